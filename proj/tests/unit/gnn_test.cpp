#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "../support/gradcheck.hpp"
#include "oncograph/gnn/model.hpp"
#include "oncograph/gnn/train.hpp"

using namespace oncograph;
using oncograph::testing::gradient_check;
using oncograph::testing::gradient_graph;
using oncograph::testing::random_graph;
using oncograph::testing::random_permutation;
using oncograph::testing::small_config;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
    return t;
}

Tensor add_t(const Tensor& a, const Tensor& b) {
    Tensor out = a.detached();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor scale_t(const Tensor& a, double c) {
    Tensor out = a.detached();
    for (double& v : out.values()) v *= c;
    return out;
}

// Evaluates f on a fresh tape where every tensor argument is a constant.
template <typename F>
Tensor eval(F f) {
    Tape tape;
    return f(tape).value().detached();
}

Tensor forward(const GnnModel& m, const FeatureGraph& g) {
    const GraphContext ctx = GraphContext::build(g, m.config());
    return eval([&](Tape& t) { return m.forward(t, ctx, g.features()); });
}

double max_row_perm_diff(const Tensor& base, const Tensor& permuted, const std::vector<std::size_t>& perm) {
    double worst = 0.0;
    for (std::size_t i = 0; i < base.rows(); ++i)
        for (std::size_t j = 0; j < base.cols(); ++j) worst = std::max(worst, std::abs(base(i, j) - permuted(perm[i], j)));
    return worst;
}

// Dense A + I with GAT's scoring, as the oracle for the sparse attention path.
Tensor dense_gat_head(const FeatureGraph& g, const Tensor& h, const Tensor& w, const Tensor& a_src, const Tensor& a_dst,
                      Tensor* alpha_out) {
    const std::size_t n = g.num_nodes();
    const Tensor wh = matmul(h, w);
    const Tensor s = matmul(wh, a_src), d = matmul(wh, a_dst);
    Tensor alpha({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, -INFINITY);
        double mx = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && !g.has_edge(i, j)) continue;
            const double raw = s[i] + d[j];
            e[j] = raw > 0 ? raw : 0.2 * raw;
            mx = std::max(mx, e[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (e[j] > -INFINITY) z += std::exp(e[j] - mx);
        for (std::size_t j = 0; j < n; ++j)
            if (e[j] > -INFINITY) alpha(i, j) = std::exp(e[j] - mx) / z;
    }
    if (alpha_out) *alpha_out = alpha;
    return matmul(alpha, wh);
}

} // namespace

// ---------------------------------------------------------------------------
// Layer-level oracles

TEST(GcnLayer, TwoNodePathHandFormula) {
    const auto g = FeatureGraph::from_edges(2, {{0, 1}}, Tensor::matrix({{1.0, 4.0}, {3.0, -2.0}}));
    const SparseMatrix adj = normalize_adjacency(g).matrix;
    const Tensor out = eval([&](Tape& t) { return gcn_layer(adj, t.constant(g.features()), t.constant(Tensor::identity(2))); });
    EXPECT_EQ(out, Tensor::matrix({{2.0, 1.0}, {2.0, 1.0}}));
}

TEST(GcnLayer, IsolatedNodesActPerNode) {
    const auto g = FeatureGraph::from_edges(3, {}, random_tensor({3, 2}, 1));
    const Tensor w = random_tensor({2, 3}, 2);
    const SparseMatrix adj = normalize_adjacency(g).matrix;
    EXPECT_EQ(eval([&](Tape& t) { return gcn_layer(adj, t.constant(g.features()), t.constant(w)); }),
              matmul(g.features(), w));
}

TEST(GcnLayer, MatchesDenseFormula) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FeatureGraph g = random_graph(8, 3, 0.35, seed);
        const Tensor w = random_tensor({3, 4}, seed + 100);
        const SparseMatrix adj = normalize_adjacency(g).matrix;
        const Tensor oracle = matmul(adj.densify(), matmul(g.features(), w));
        const Tensor got = eval([&](Tape& t) { return gcn_layer(adj, t.constant(g.features()), t.constant(w)); });
        EXPECT_LT(max_abs_diff(got, oracle), 1e-12);
    }
}

TEST(ChebLayer, ZeroCoefficientsGiveZero) {
    const FeatureGraph g = random_graph(6, 2, 0.5, 3);
    const SparseMatrix l = scaled_laplacian(g).matrix;
    const Tensor out = eval([&](Tape& t) {
        std::vector<Var> theta(3, t.constant(Tensor({2, 3})));
        return cheb_layer(l, t.constant(g.features()), theta);
    });
    EXPECT_EQ(out, Tensor({6, 3}));
}

TEST(ChebModel, OrderOneIsNodeLocal) {
    const FeatureGraph g = random_graph(8, 3, 0.5, 4);
    ModelConfig c = small_config(Operator::chebnet);
    c.order = 1;
    const GnnModel m(c, 3, 3);
    const Tensor base = forward(m, g);
    Tensor x = g.features().detached();
    for (std::size_t j = 0; j < 3; ++j) x(5, j) += 10.0;
    const FeatureGraph h(g.nodes(), g.edges(), x, g.labels());
    const Tensor changed = forward(m, h);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i == 5) continue;
        for (std::size_t j = 0; j < base.cols(); ++j) EXPECT_EQ(base(i, j), changed(i, j));
    }
}

TEST(SageLayer, IsolatedAndEqualNeighbor) {
    const Tensor x = Tensor::matrix({{1.0, 2.0}, {1.0, 2.0}, {-1.0, 0.5}});
    const auto g = FeatureGraph::from_edges(3, {{0, 1}}, x);
    const Tensor w = random_tensor({2, 2}, 5);
    const SparseMatrix m = mean_aggregation(g, true);
    const Tensor out = eval([&](Tape& t) { return sage_layer(m, t.constant(x), t.constant(w)); });
    const Tensor local = matmul(x, w);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(out(i, j), local(i, j), 1e-15);
}

TEST(SageLayer, MatchesDenseMeanOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FeatureGraph g = random_graph(8, 3, 0.35, seed);
        const Tensor w = random_tensor({3, 2}, seed + 7);
        Tensor mean({8, 3});
        for (std::size_t i = 0; i < 8; ++i) {
            std::vector<std::size_t> members = {i};
            for (std::size_t j : g.neighbors(i)) members.push_back(j);
            for (std::size_t j : members)
                for (std::size_t f = 0; f < 3; ++f) mean(i, f) += g.features()(j, f) / static_cast<double>(members.size());
        }
        const SparseMatrix agg = mean_aggregation(g, true);
        const Tensor got = eval([&](Tape& t) { return sage_layer(agg, t.constant(g.features()), t.constant(w)); });
        EXPECT_LT(max_abs_diff(got, matmul(mean, w)), 1e-12);
    }
}

TEST(GinCombine, HandCasesAndDenseOracle) {
    // Two connected nodes with equal features f: (1 + 0) f + f = 2f.
    const Tensor f = Tensor::matrix({{0.5, -1.5}, {0.5, -1.5}});
    const auto pair = FeatureGraph::from_edges(2, {{0, 1}}, f);
    const SparseMatrix mean_pair = mean_aggregation(pair, false);
    EXPECT_EQ(eval([&](Tape& t) { return gin_combine(mean_pair, t.constant(f)); }), scale_t(f, 2.0));

    // Isolated node: neighbor mean is zero, so the combination is (1 + eps) h.
    const auto single = FeatureGraph::from_edges(1, {}, Tensor::matrix({{2.0, 3.0}}));
    const SparseMatrix mean_single = mean_aggregation(single, false);
    EXPECT_EQ(eval([&](Tape& t) {
                  return gin_combine(mean_single, t.constant(single.features()), t.constant(Tensor::scalar(0.5)));
              }),
              Tensor::matrix({{3.0, 4.5}}));

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const FeatureGraph g = random_graph(6, 3, 0.4, seed);
        const double eps = 0.3;
        Tensor oracle({6, 3});
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t c = 0; c < 3; ++c) {
                double nb = 0.0;
                for (std::size_t j : g.neighbors(i)) nb += g.features()(j, c);
                oracle(i, c) = (1.0 + eps) * g.features()(i, c) + (g.degree(i) ? nb / static_cast<double>(g.degree(i)) : 0.0);
            }
        const SparseMatrix agg = mean_aggregation(g, false);
        const Tensor got = eval(
            [&](Tape& t) { return gin_combine(agg, t.constant(g.features()), t.constant(Tensor::scalar(eps))); });
        EXPECT_LT(max_abs_diff(got, oracle), 1e-12);
    }
}

TEST(GinModel, MatchesLiteralUpdate) {
    const FeatureGraph g = random_graph(6, 3, 0.4, 9);
    ModelConfig c = small_config(Operator::gin);
    c.num_layers = 1;
    GnnModel m(c, 3, 2);
    m.params().at("layer0.eps")[0] = 0.25;
    const auto& p = m.params();
    Tensor z({6, 3});
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t f = 0; f < 3; ++f) {
            double nb = 0.0;
            for (std::size_t j : g.neighbors(i)) nb += g.features()(j, f);
            z(i, f) = 1.25 * g.features()(i, f) + (g.degree(i) ? nb / static_cast<double>(g.degree(i)) : 0.0);
        }
    auto dense_layer = [](const Tensor& x, const Tensor& w, const Tensor& b) {
        Tensor y = matmul(x, w);
        for (std::size_t i = 0; i < y.rows(); ++i)
            for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b[j];
        return y;
    };
    auto tanh_t = [](Tensor t) {
        for (double& v : t.values()) v = std::tanh(v);
        return t;
    };
    Tensor h = tanh_t(dense_layer(z, p.at("layer0.mlp0.weight"), p.at("layer0.mlp0.bias")));
    h = tanh_t(dense_layer(h, p.at("layer0.mlp1.weight"), p.at("layer0.mlp1.bias")));
    const Tensor oracle = dense_layer(h, p.at("head.weight"), p.at("head.bias"));
    EXPECT_LT(max_abs_diff(forward(m, g), oracle), 1e-12);
}

TEST(GinReadout, ConcatenatesColumnMeans) {
    const std::vector<Tensor> one = {Tensor::matrix({{1.5, -2.0}})};
    EXPECT_EQ(gin_readout(one), Tensor::matrix({{1.5, -2.0}}));
    const std::vector<Tensor> two = {random_tensor({5, 2}, 1), random_tensor({5, 2}, 2)};
    const Tensor r = gin_readout(two);
    ASSERT_EQ(r.size(), 4u);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < 5; ++i) s += two[k](i, j);
            EXPECT_NEAR(r[2 * k + j], s / 5.0, 1e-12);
        }
    EXPECT_THROW(gin_readout(std::vector<Tensor>{}), UsageError);
}

TEST(TagcnLayer, HandCasesAndDenseOracle) {
    const FeatureGraph g = random_graph(6, 3, 0.4, 11);
    const SparseMatrix adj = normalize_adjacency(g).matrix;
    const Tensor w0 = random_tensor({3, 2}, 1), w1 = random_tensor({3, 2}, 2), w2 = random_tensor({3, 2}, 3);
    const Tensor zero({3, 2});
    auto run = [&](const Tensor& a, const Tensor& b, const Tensor& c) {
        return eval([&](Tape& t) {
            std::vector<Var> ws = {t.constant(a), t.constant(b), t.constant(c)};
            return tagcn_layer(adj, t.constant(g.features()), ws);
        });
    };
    EXPECT_EQ(run(w0, zero, zero), matmul(g.features(), w0));
    EXPECT_EQ(run(zero, zero, zero), Tensor({6, 2}));
    const Tensor a = adj.densify();
    const Tensor ax = matmul(a, g.features());
    const Tensor oracle = add_t(add_t(matmul(g.features(), w0), matmul(ax, w1)), matmul(matmul(a, ax), w2));
    EXPECT_LT(max_abs_diff(run(w0, w1, w2), oracle), 1e-12);
}

TEST(GatLayer, MatchesDenseAttentionOracle) {
    const FeatureGraph g = random_graph(6, 3, 0.4, 13);
    const SparseMatrix support = self_loop_pattern(g);
    const Tensor w0 = random_tensor({3, 2}, 1), s0 = random_tensor({2, 1}, 2), d0 = random_tensor({2, 1}, 3);
    const Tensor w1 = random_tensor({3, 2}, 4), s1 = random_tensor({2, 1}, 5), d1 = random_tensor({2, 1}, 6);
    Tape t;
    std::vector<GatHead> heads = {{t.constant(w0), t.constant(s0), t.constant(d0)},
                                  {t.constant(w1), t.constant(s1), t.constant(d1)}};
    const GatOutput out = gat_layer(support, t.constant(g.features()), heads, true);
    Tensor alpha0, alpha1;
    const Tensor o0 = dense_gat_head(g, g.features(), w0, s0, d0, &alpha0);
    const Tensor o1 = dense_gat_head(g, g.features(), w1, s1, d1, &alpha1);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_NEAR(out.out.value()(i, j), o0(i, j), 1e-12);
            EXPECT_NEAR(out.out.value()(i, j + 2), o1(i, j), 1e-12);
        }
    const Tensor& a = out.attention[0].value();
    const auto rows = support.row_of_entries();
    for (std::size_t k = 0; k < support.nnz(); ++k) EXPECT_NEAR(a[k], alpha0(rows[k], support.indices()[k]), 1e-12);
    for (std::size_t i = 0; i < 6; ++i) {
        double total = 0.0;
        for (std::size_t k = support.row_begin(i); k < support.row_end(i); ++k) total += a[k];
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
    const GatOutput avg = gat_layer(support, t.constant(g.features()), heads, false);
    EXPECT_LT(max_abs_diff(avg.out.value(), scale_t(add_t(o0, o1), 0.5)), 1e-12);
}

TEST(GatLayer, IsolatedNodeSelfAttendsExactly) {
    const auto g = FeatureGraph::from_edges(3, {{0, 1}}, random_tensor({3, 2}, 1));
    const SparseMatrix support = self_loop_pattern(g);
    const Tensor w = random_tensor({2, 2}, 2);
    Tape t;
    std::vector<GatHead> heads = {{t.constant(w), t.constant(random_tensor({2, 1}, 3)), t.constant(random_tensor({2, 1}, 4))}};
    const GatOutput out = gat_layer(support, t.constant(g.features()), heads, true);
    ASSERT_EQ(support.row_end(2) - support.row_begin(2), 1u);
    EXPECT_EQ(out.attention[0].value()[support.row_begin(2)], 1.0);
    const Tensor wh = matmul(g.features(), w);
    EXPECT_EQ(out.out.value()(2, 0), wh(2, 0));
    EXPECT_EQ(out.out.value()(2, 1), wh(2, 1));
}

TEST(GatLayer, EqualFeaturesOnCliqueAreUniform) {
    const auto g = FeatureGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, Tensor::full({4, 2}, 0.7));
    const SparseMatrix support = self_loop_pattern(g);
    Tape t;
    std::vector<GatHead> heads = {
        {t.constant(random_tensor({2, 3}, 1)), t.constant(random_tensor({3, 1}, 2)), t.constant(random_tensor({3, 1}, 3))}};
    const GatOutput out = gat_layer(support, t.constant(g.features()), heads, true);
    for (double a : out.attention[0].value().values()) EXPECT_NEAR(a, 0.25, 1e-15);
}

TEST(AgnnPropagate, IsolatedNodeGetsZeroMessage) {
    const auto g = FeatureGraph::from_edges(2, {}, Tensor::matrix({{1.0, 2.0}, {3.0, 4.0}}));
    const SparseMatrix nb = g.adjacency();
    EXPECT_EQ(eval([&](Tape& t) { return agnn_propagate(nb, t.constant(g.features()), t.constant(Tensor::scalar(1.0))).out; }),
              Tensor({2, 2}));
}

TEST(AgnnPropagate, SingleNeighborWeightsOne) {
    const Tensor x = Tensor::matrix({{1.0, -1.0}, {1.0, -1.0}});
    const auto g = FeatureGraph::from_edges(2, {{0, 1}}, x);
    const SparseMatrix nb = g.adjacency();
    Tape t;
    const AgnnOutput out = agnn_propagate(nb, t.constant(x), t.constant(Tensor::scalar(1.0)));
    EXPECT_EQ(out.attention.value()[0], 1.0);
    EXPECT_EQ(out.attention.value()[1], 1.0);
    EXPECT_EQ(out.out.value(), x);
}

TEST(AgnnPropagate, StarMatchesHandSoftmaxOfCosines) {
    // Hub 0 with leaves 1..3.
    const Tensor x = Tensor::matrix({{1.0, 0.0}, {1.0, 1.0}, {0.0, 2.0}, {-3.0, 0.0}});
    const auto g = FeatureGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}}, x);
    const SparseMatrix nb = g.adjacency();
    Tape t;
    const AgnnOutput out = agnn_propagate(nb, t.constant(x), t.constant(Tensor::scalar(1.0)));
    const double c1 = 1.0 / std::sqrt(2.0), c2 = 0.0, c3 = -1.0;
    const double z = std::exp(c1) + std::exp(c2) + std::exp(c3);
    const std::vector<double> hub = {std::exp(c1) / z, std::exp(c2) / z, std::exp(c3) / z};
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(out.attention.value()[nb.row_begin(0) + k], hub[k], 1e-12);
    for (std::size_t leaf = 1; leaf <= 3; ++leaf) EXPECT_EQ(out.attention.value()[nb.row_begin(leaf)], 1.0);
    for (std::size_t j = 0; j < 2; ++j)
        EXPECT_NEAR(out.out.value()(0, j), hub[0] * x(1, j) + hub[1] * x(2, j) + hub[2] * x(3, j), 1e-12);
}

TEST(AgnnPropagate, ZeroNormRowsHaveZeroCosine) {
    const Tensor x = Tensor::matrix({{0.0, 0.0}, {1.0, 1.0}, {2.0, -1.0}});
    const auto g = FeatureGraph::from_edges(3, {{0, 1}, {0, 2}}, x);
    const SparseMatrix nb = g.adjacency();
    Tape t;
    const AgnnOutput out = agnn_propagate(nb, t.constant(x), t.constant(Tensor::scalar(3.0)));
    EXPECT_EQ(out.attention.value()[0], 0.5);
    EXPECT_EQ(out.attention.value()[1], 0.5);
}

TEST(SgcPropagate, MatchesRepeatedDenseProduct) {
    const FeatureGraph g = random_graph(8, 3, 0.4, 17);
    const SparseMatrix adj = normalize_adjacency(g).matrix;
    const Tensor a = adj.densify();
    EXPECT_LT(max_abs_diff(sgc_propagate(adj, g.features(), 2), matmul(a, matmul(a, g.features()))), 1e-12);
    const auto isolated = FeatureGraph::from_edges(3, {}, random_tensor({3, 2}, 1));
    EXPECT_EQ(sgc_propagate(normalize_adjacency(isolated).matrix, isolated.features(), 1), isolated.features());
}

// ---------------------------------------------------------------------------
// Model-level properties

TEST(GnnModel, EveryOperatorIsPermutationEquivariant) {
    for (Operator op : kAllOperators) {
        const GnnModel m(small_config(op), 3, 4);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const FeatureGraph g = random_graph(8, 3, 0.35, seed);
            const auto perm = random_permutation(8, seed + 50);
            EXPECT_LE(max_row_perm_diff(forward(m, g), forward(m, permute_graph(g, perm)), perm), 1e-9)
                << to_string(op) << " seed " << seed;
        }
    }
}

TEST(GnnModel, EveryOperatorPassesGradientCheck) {
    const FeatureGraph g = gradient_graph();
    const std::vector<int> y = {0, 1, 2, 0, 1, 2};
    for (Operator op : kAllOperators) {
        GnnModel m(small_config(op), 4, 3);
        const GraphContext ctx = GraphContext::build(g, m.config());
        const auto r = gradient_check(m.params(), [&](Tape& t) { return cross_entropy(m.forward(t, ctx, g.features()), y); });
        EXPECT_LE(r.max_relative_error, 1e-4) << to_string(op) << " worst " << r.worst_parameter << "[" << r.worst_index << "]";
        EXPECT_EQ(r.checked, m.params().scalar_count());
    }
}

TEST(GnnModel, GatModelAttentionRowsSumToOne) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FeatureGraph g = random_graph(8, 3, 0.3, seed);
        const SparseMatrix support = self_loop_pattern(g);
        Tape t;
        std::vector<GatHead> heads;
        for (std::uint64_t k = 0; k < 3; ++k)
            heads.push_back({t.constant(random_tensor({3, 4}, seed * 10 + k)), t.constant(random_tensor({4, 1}, seed * 20 + k)),
                             t.constant(random_tensor({4, 1}, seed * 30 + k))});
        for (const Var& a : gat_layer(support, t.constant(g.features()), heads, true).attention)
            for (std::size_t i = 0; i < 8; ++i) {
                double total = 0.0;
                for (std::size_t k = support.row_begin(i); k < support.row_end(i); ++k) total += a.value()[k];
                EXPECT_NEAR(total, 1.0, 1e-12);
            }
    }
}

TEST(GnnModel, SgcIsLinearAndCacheIsExact) {
    const FeatureGraph g = random_graph(8, 3, 0.4, 19);
    const GnnModel m(ModelConfig::defaults_for(Operator::sgc), 3, 4);
    const Tensor base = forward(m, g);
    const FeatureGraph scaled(g.nodes(), g.edges(), scale_t(g.features(), 2.5), g.labels());
    EXPECT_LT(max_abs_diff(forward(m, scaled), scale_t(base, 2.5)), 1e-9);
    const GraphContext ctx = GraphContext::build(g, m.config());
    const Tensor cached = sgc_propagate(ctx.adjacency, g.features(), 2);
    EXPECT_EQ(eval([&](Tape& t) { return m.sgc_logits(t, cached); }), base);
    EXPECT_FALSE(m.params().contains("bias"));
}

TEST(GnnModel, ParameterLayout) {
    EXPECT_TRUE(GnnModel(ModelConfig::defaults_for(Operator::chebnet), 5, 7).params().contains("layer1.theta2"));
    EXPECT_TRUE(GnnModel(ModelConfig::defaults_for(Operator::tagcn), 5, 7).params().contains("layer0.hop2"));
    const GnnModel gat(ModelConfig::defaults_for(Operator::gat), 5, 7);
    EXPECT_EQ(gat.params().at("layer0.head7.weight").shape(), (Shape{5, 8}));
    EXPECT_EQ(gat.params().at("layer1.head0.weight").shape(), (Shape{64, 7}));
    ModelConfig fixed_eps = ModelConfig::defaults_for(Operator::gin);
    fixed_eps.epsilon_learnable = false;
    EXPECT_FALSE(GnnModel(fixed_eps, 5, 7).params().contains("layer0.eps"));
    EXPECT_THROW(GnnModel(ModelConfig::defaults_for(Operator::gcn), 0, 7), ConfigError);
}

TEST(GnnModel, ConfigValidationAndJson) {
    ModelConfig c = ModelConfig::defaults_for(Operator::tagcn);
    EXPECT_EQ(c.resolved_order(), 2u);
    EXPECT_EQ(ModelConfig::defaults_for(Operator::chebnet).resolved_order(), 3u);
    c.hidden_dim = 16;
    c.dropout = 0.25;
    const ModelConfig back = ModelConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    ModelConfig bad = c;
    bad.lr = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.dropout = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.heads = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(GnnModel, DropoutOnlyActsWhileTraining) {
    const FeatureGraph g = random_graph(8, 3, 0.4, 21);
    ModelConfig c = small_config(Operator::gcn);
    c.dropout = 0.5;
    const GnnModel m(c, 3, 3);
    const GraphContext ctx = GraphContext::build(g, c);
    auto run = [&](bool training, std::uint64_t seed) {
        return eval([&](Tape& t) { return m.forward(t, ctx, g.features(), {training, seed, nullptr}); });
    };
    EXPECT_EQ(run(false, 1), run(false, 2));
    EXPECT_EQ(run(true, 1), run(true, 1));
    EXPECT_NE(run(true, 1), run(true, 2));
}

namespace {

// Two classes of five nodes, each a path, with class-indicating features.
FeatureGraph separable_toy() {
    Tensor x({10, 2});
    std::vector<int> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        y[i] = i < 5 ? 0 : 1;
        x(i, i < 5 ? 0 : 1) = 1.0;
    }
    return FeatureGraph::from_edges(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9}}, x, y);
}

TrainingMasks toy_masks() {
    TrainingMasks m;
    for (std::size_t i = 0; i < 10; ++i) m.train.push_back(i);
    m.val = {0, 9};
    m.test = {4, 5};
    return m;
}

} // namespace

TEST(TrainModel, ZeroEpochsReturnsInitialization) {
    const FeatureGraph g = separable_toy();
    ModelConfig c = small_config(Operator::gcn);
    c.epochs = 0;
    const TrainedModel t = train_model(g, toy_masks(), c, 2);
    EXPECT_TRUE(t.trace.empty());
    EXPECT_EQ(t.model.params(), GnnModel(c, 2, 2).params());
}

TEST(TrainModel, SeparableToyReachesFullTrainAccuracy) {
    const FeatureGraph g = separable_toy();
    for (Operator op : kAllOperators) {
        ModelConfig c = ModelConfig::defaults_for(op);
        c.hidden_dim = 16;
        c.heads = 2;
        const TrainedModel t = train_model(g, toy_masks(), c, 2);
        ASSERT_FALSE(t.trace.empty());
        const bool reached = std::any_of(t.trace.begin(), t.trace.end(), [](const EpochStats& s) { return s.train_accuracy == 1.0; });
        EXPECT_TRUE(reached) << to_string(op);
        const Prediction p = predict(t.model, g, toy_masks().train);
        std::vector<int> truth(g.labels().begin(), g.labels().end());
        EXPECT_EQ(p.classes, truth) << to_string(op);
    }
}

TEST(TrainModel, DeterministicGivenSeed) {
    const FeatureGraph g = random_graph(12, 4, 0.3, 23);
    TrainingMasks m;
    m.train = {0, 1, 2, 3, 4, 5, 6, 7};
    m.val = {8, 9};
    m.test = {10, 11};
    for (Operator op : {Operator::gat, Operator::gin, Operator::agnn}) {
        ModelConfig c = small_config(op);
        c.epochs = 20;
        c.dropout = 0.3;
        const TrainedModel a = train_model(g, m, c, 3);
        const TrainedModel b = train_model(g, m, c, 3);
        EXPECT_EQ(a.trace, b.trace) << to_string(op);
        EXPECT_EQ(a.model.params(), b.model.params()) << to_string(op);
        EXPECT_EQ(a.best_epoch, b.best_epoch);
    }
}

TEST(TrainModel, MaskErrors) {
    const FeatureGraph g = separable_toy();
    TrainingMasks m = toy_masks();
    m.val.clear();
    EXPECT_THROW(train_model(g, m, small_config(Operator::gcn), 2), ConfigError);
    const auto unlabeled = FeatureGraph::from_edges(3, {}, Tensor({3, 1}));
    TrainingMasks u{{0}, {1}, {2}};
    EXPECT_THROW(train_model(unlabeled, u, small_config(Operator::gcn), 2), ConfigError);
}

TEST(Predict, UniformLogitsPickClassZero) {
    const FeatureGraph g = separable_toy();
    GnnModel m(ModelConfig::defaults_for(Operator::sgc), 2, 4);
    for (double& v : m.params().at("weight").values()) v = 0.0;
    const Prediction p = predict(m, g, std::vector<std::size_t>{0, 7});
    EXPECT_EQ(p.classes, (std::vector<int>{0, 0}));
    for (double v : p.probabilities.values()) EXPECT_EQ(v, 0.25);
    EXPECT_EQ(argmax(std::vector<double>{0.2, 0.4, 0.4}), 1);
}

TEST(Predict, RowsSumToOneAndPermutationInvariant) {
    const FeatureGraph g = random_graph(8, 3, 0.4, 29);
    const GnnModel m(small_config(Operator::graphsage), 3, 5);
    std::vector<std::size_t> nodes(8);
    for (std::size_t i = 0; i < 8; ++i) nodes[i] = i;
    const Prediction p = predict(m, g, nodes);
    for (std::size_t i = 0; i < 8; ++i) {
        double s = 0.0;
        for (double v : p.probabilities.row(i)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    const auto perm = random_permutation(8, 31);
    std::vector<std::size_t> mapped(8);
    for (std::size_t i = 0; i < 8; ++i) mapped[i] = perm[i];
    const Prediction q = predict(m, permute_graph(g, perm), mapped);
    EXPECT_EQ(q.classes, p.classes);
    EXPECT_LT(max_abs_diff(q.probabilities, p.probabilities), 1e-9);
}

TEST(Predict, VocabularyMismatchIsADataError) {
    const FeatureGraph g = separable_toy();
    const GnnModel m(small_config(Operator::gcn), 2, 2, 0xabc);
    EXPECT_THROW(predict(m, g, std::vector<std::size_t>{0}), DataError);
    const GnnModel wide(small_config(Operator::gcn), 3, 2);
    EXPECT_THROW(predict(wide, g, std::vector<std::size_t>{0}), DataError);
}

TEST(GnnCheckpoint, RoundTripReproducesLogits) {
    const FeatureGraph g = random_graph(8, 3, 0.4, 37);
    for (Operator op : kAllOperators) {
        const GnnModel m(small_config(op), 3, 4, 77);
        std::stringstream s;
        write_checkpoint(s, m.to_checkpoint());
        const GnnModel back = GnnModel::from_checkpoint(read_checkpoint(s, 77));
        EXPECT_EQ(back.params(), m.params()) << to_string(op);
        EXPECT_EQ(forward(back, g), forward(m, g)) << to_string(op);
    }
    std::stringstream s;
    write_checkpoint(s, GnnModel(small_config(Operator::gcn), 3, 4, 77).to_checkpoint());
    EXPECT_THROW(read_checkpoint(s, 78), DataError);
    Checkpoint other;
    other.kind = "naive_bayes";
    EXPECT_THROW(GnnModel::from_checkpoint(other), DataError);
}
