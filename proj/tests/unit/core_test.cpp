#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "../support/gradcheck.hpp"
#include "oncograph/core/adam.hpp"
#include "oncograph/core/checkpoint.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/parameters.hpp"
#include "oncograph/core/trainer.hpp"

using namespace oncograph;
using oncograph::testing::gradient_check;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

// Weighted sum so every output entry carries a distinct gradient.
Var weighted_sum(Tape& tape, Var y, std::uint64_t seed) {
    return sum(mul(y, tape.constant(random_tensor(y.shape(), seed))));
}

SparseMatrix small_pattern() {
    // Row 3 has no entries.
    return SparseMatrix::from_triplets(4, 4, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {1, 3, 1}, {2, 2, 1}});
}

} // namespace

TEST(Tensor, ShapeChecks) {
    EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
    EXPECT_THROW(Tensor::matrix({{1.0, 2.0}, {3.0}}), DimensionError);
    EXPECT_THROW((void)Tensor({2}).item(), UsageError);
    EXPECT_THROW(matmul(Tensor({2, 3}), Tensor({2, 3})), DimensionError);
}

TEST(Tensor, MatmulAndTranspose) {
    const Tensor a = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
    const Tensor b = Tensor::matrix({{1, 0}, {0, 1}, {1, 1}});
    EXPECT_EQ(matmul(a, b), Tensor::matrix({{4, 5}, {10, 11}}));
    EXPECT_EQ(transpose(a), Tensor::matrix({{1, 4}, {2, 5}, {3, 6}}));
}

TEST(Sparse, MatchesDenseProduct) {
    const Tensor dense = random_tensor({5, 5}, 1);
    Tensor masked = dense;
    for (std::size_t i = 0; i < masked.size(); ++i)
        if (i % 3 == 0) masked[i] = 0.0;
    const SparseMatrix s = SparseMatrix::from_dense(masked);
    EXPECT_EQ(s.densify(), masked);
    const Tensor x = random_tensor({5, 3}, 2);
    EXPECT_LT(max_abs_diff(spmm(s, x), matmul(masked, x)), 1e-15);
}

TEST(Sparse, TripletsAreSummedAndSorted) {
    const auto s = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 0.5}, {1, 0, 3.0}});
    EXPECT_EQ(s.nnz(), 3u);
    EXPECT_DOUBLE_EQ(s.at(1, 2), 1.5);
    EXPECT_DOUBLE_EQ(s.at(0, 0), 0.0);
    EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST(Rng, DeterministicStreams) {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
    EXPECT_NE(mix_seed(42, 0), mix_seed(42, 1));
    EXPECT_EQ(mix_seed(42, 5), mix_seed(42, 5));
    Rng c(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(c.below(7), 7u);
    }
}

TEST(Tape, ForeignVariableIsRejected) {
    Tape t1, t2;
    Var a = t1.constant(Tensor::scalar(1.0));
    Var b = t2.constant(Tensor::scalar(2.0));
    EXPECT_THROW(add(a, b), UsageError);
}

TEST(Tape, BackwardNeedsScalar) {
    Tape t;
    Tensor p = random_tensor({2, 2}, 3);
    p.set_requires_grad(true);
    EXPECT_THROW(t.backward(t.parameter(p)), UsageError);
}

TEST(Tape, NonFiniteValueRaises) {
    Tape t;
    Var a = t.constant(Tensor::scalar(std::numeric_limits<double>::max()));
    EXPECT_THROW(scale(a, 10.0), NumericError);
}

TEST(Tape, ParameterGradientsAccumulateUntilCleared) {
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::matrix({{2.0, -1.0}}));
    for (int pass = 1; pass <= 2; ++pass) {
        Tape t;
        t.backward(sum(mul(t.parameter(w), t.parameter(w))));
        EXPECT_DOUBLE_EQ(w.grad()[0], pass * 4.0);
        EXPECT_DOUBLE_EQ(w.grad()[1], pass * -2.0);
    }
    ps.zero_grad();
    EXPECT_FALSE(w.has_grad());
}

TEST(Tape, ConstantsReceiveNoGradient) {
    Tape t;
    Var c = t.constant(Tensor::scalar(3.0));
    Var y = scale(c, 2.0);
    t.backward(y);
    EXPECT_TRUE(t.grad(c).empty());
}

// Central-difference checks of every differentiable primitive.

TEST(OpsGradient, ElementwiseAndMatmul) {
    ParameterSet ps;
    Tensor& a = ps.add("a", random_tensor({3, 4}, 10));
    Tensor& b = ps.add("b", random_tensor({4, 2}, 11));
    Tensor& c = ps.add("c", random_tensor({3, 4}, 12));
    Tensor& bias = ps.add("bias", random_tensor({1, 4}, 13));
    Tensor& s = ps.add("s", Tensor::scalar(0.7));
    auto loss = [&](Tape& t) {
        Var av = t.parameter(a), cv = t.parameter(c);
        Var z = add(mul(sigmoid(av), tanh(cv)), t.parameter(bias));
        z = sub(elu(z), scale_by(leaky_relu(cv, 0.1), t.parameter(s)));
        return weighted_sum(t, matmul(z, t.parameter(b)), 14);
    };
    EXPECT_LT(gradient_check(ps, loss).max_relative_error, 1e-6);
}

TEST(OpsGradient, ReluAwayFromKink) {
    ParameterSet ps;
    Tensor& a = ps.add("a", Tensor::matrix({{-0.8, 0.3}, {0.5, -0.2}}));
    auto loss = [&](Tape& t) { return weighted_sum(t, relu(t.parameter(a)), 1); };
    EXPECT_LT(gradient_check(ps, loss).max_relative_error, 1e-6);
}

TEST(OpsGradient, ReductionsSoftmaxAndCrossEntropy) {
    ParameterSet ps;
    Tensor& a = ps.add("a", random_tensor({4, 3}, 20));
    Tensor& b = ps.add("b", random_tensor({4, 2}, 21));
    const std::vector<int> labels = {2, 0, 1};
    const std::vector<std::size_t> rows = {0, 2, 3};
    auto loss = [&](Tape& t) {
        Var av = t.parameter(a);
        Var cat = concat_cols(std::vector<Var>{av, t.parameter(b)});
        Var l1 = cross_entropy(matmul(cat, t.constant(random_tensor({5, 3}, 22))), rows, labels);
        Var l2 = weighted_sum(t, softmax_rows(av), 23);
        Var l3 = weighted_sum(t, mean_rows(row_normalize(av)), 24);
        return add(add(l1, l2), l3);
    };
    EXPECT_LT(gradient_check(ps, loss).max_relative_error, 1e-6);
}

TEST(OpsGradient, SparseAndEdgeOps) {
    const SparseMatrix pattern = small_pattern();
    ParameterSet ps;
    Tensor& h = ps.add("h", random_tensor({4, 3}, 30));
    Tensor& src = ps.add("src", random_tensor({4, 1}, 31));
    Tensor& dst = ps.add("dst", random_tensor({4, 1}, 32));
    auto loss = [&](Tape& t) {
        Var hv = t.parameter(h);
        Var e = add(edge_scores(pattern, t.parameter(src), t.parameter(dst)), edge_dot(pattern, hv, hv));
        Var alpha = edge_softmax(pattern, e);
        return weighted_sum(t, add(edge_aggregate(pattern, alpha, hv), spmm(pattern, hv)), 33);
    };
    EXPECT_LT(gradient_check(ps, loss).max_relative_error, 1e-6);
}

TEST(Ops, EdgeSoftmaxRowsSumToOne) {
    const SparseMatrix pattern = small_pattern();
    Tape t;
    Var s = t.constant(random_tensor({pattern.nnz(), 1}, 40, -5, 5));
    const Tensor alpha = edge_softmax(pattern, s).value();
    for (std::size_t r = 0; r < 3; ++r) {
        double total = 0.0;
        for (std::size_t k = pattern.row_begin(r); k < pattern.row_end(r); ++k) total += alpha[k];
        EXPECT_NEAR(total, 1.0, 1e-15);
    }
}

TEST(Ops, CrossEntropyHandValue) {
    Tape t;
    Var z = t.constant(Tensor::matrix({{0.0, 0.0}, {std::log(3.0), 0.0}}));
    const std::vector<int> y = {0, 0};
    // -(log 1/2 + log 3/4) / 2
    EXPECT_NEAR(cross_entropy(z, y).value().item(), -(std::log(0.5) + std::log(0.75)) / 2.0, 1e-15);
    const std::vector<int> bad = {0, 2};
    EXPECT_THROW(cross_entropy(z, bad), DataError);
}

TEST(Ops, DropoutIsSeededAndInverted) {
    Tape t;
    Var x = t.constant(Tensor::full({50, 20}, 1.0));
    const Tensor a = dropout(x, 0.5, 9, true).value();
    const Tensor b = dropout(x, 0.5, 9, true).value();
    const Tensor c = dropout(x, 0.5, 10, true).value();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    std::size_t zeros = 0;
    for (double v : a.values()) {
        EXPECT_TRUE(v == 0.0 || v == 2.0);
        zeros += v == 0.0;
    }
    EXPECT_GT(zeros, 400u);
    EXPECT_LT(zeros, 600u);
    EXPECT_EQ(dropout(x, 0.5, 9, false).value(), x.value());
    EXPECT_THROW(dropout(x, 1.0, 9, true), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    // With bias correction the first step is lr * g / (|g| + eps) per entry.
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::matrix({{1.0, -2.0, 0.5}}));
    auto g = w.grad_mut();
    g[0] = 0.3;
    g[1] = -4.0;
    g[2] = 0.0;
    AdamState adam(AdamOptions{.lr = 0.1});
    auto ptrs = ps.pointers();
    adam.step(ptrs);
    EXPECT_NEAR(w[0], 1.0 - 0.1 * 0.3 / (0.3 + 1e-8), 1e-15);
    EXPECT_NEAR(w[1], -2.0 + 0.1 * 4.0 / (4.0 + 1e-8), 1e-15);
    EXPECT_DOUBLE_EQ(w[2], 0.5);
}

TEST(Adam, DecoupledWeightDecay) {
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::scalar(2.0));
    AdamState adam(AdamOptions{.lr = 0.1, .weight_decay = 0.5});
    auto ptrs = ps.pointers();
    adam.step(ptrs);
    EXPECT_DOUBLE_EQ(w[0], 2.0 - 0.1 * 0.5 * 2.0);
    EXPECT_THROW(AdamState(AdamOptions{.lr = 0.0}), ConfigError);
}

TEST(Adam, MatchesReferenceRecurrence) {
    const AdamOptions o{.lr = 0.05, .beta1 = 0.8, .beta2 = 0.99, .epsilon = 1e-6, .weight_decay = 0.01};
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::scalar(1.5));
    AdamState adam(o);
    auto ptrs = ps.pointers();
    double p = 1.5, m = 0.0, v = 0.0;
    for (int t = 1; t <= 20; ++t) {
        const double g = std::sin(t);
        w.grad_mut()[0] = g;
        adam.step(ptrs);
        w.clear_grad();
        p -= o.lr * o.weight_decay * p;
        m = o.beta1 * m + (1 - o.beta1) * g;
        v = o.beta2 * v + (1 - o.beta2) * g * g;
        p -= o.lr * (m / (1 - std::pow(o.beta1, t))) / (std::sqrt(v / (1 - std::pow(o.beta2, t))) + o.epsilon);
        EXPECT_NEAR(w[0], p, 1e-14);
    }
}

TEST(Parameters, DuplicateNamesAndSnapshots) {
    ParameterSet ps;
    ps.add("a", Tensor::scalar(1.0));
    EXPECT_THROW(ps.add("a", Tensor::scalar(2.0)), UsageError);
    EXPECT_THROW(ps.at("missing"), UsageError);
    const auto snap = ps.snapshot();
    ps.at("a")[0] = 5.0;
    ps.restore(snap);
    EXPECT_DOUBLE_EQ(ps.at("a")[0], 1.0);
}

TEST(Checkpoint, RoundTripIsExact) {
    Checkpoint c;
    c.kind = "test";
    c.vocab_hash = 0xfedcba9876543210ULL;
    c.config["x"] = 1;
    c.tensors.emplace_back("w", random_tensor({3, 2}, 50));
    c.tensors.emplace_back("b", Tensor::vector({1.0 / 3.0, -2e-300}));
    c.payload["note"] = "ok";
    std::stringstream s;
    write_checkpoint(s, c);
    const Checkpoint r = read_checkpoint(s, c.vocab_hash);
    EXPECT_EQ(r.kind, "test");
    EXPECT_EQ(r.vocab_hash, c.vocab_hash);
    EXPECT_EQ(r.tensor("w"), c.tensor("w"));
    EXPECT_EQ(r.tensor("b"), c.tensor("b"));
    EXPECT_EQ(r.payload, c.payload);
    EXPECT_THROW(r.tensor("zz"), DataError);
}

TEST(Checkpoint, RejectsMismatchAndGarbage) {
    Checkpoint c;
    c.kind = "test";
    c.vocab_hash = 1;
    std::stringstream s;
    write_checkpoint(s, c);
    EXPECT_THROW(read_checkpoint(s, 2), DataError);
    std::stringstream garbage("{not json");
    EXPECT_THROW(read_checkpoint(garbage), ParseError);
    std::stringstream other(R"({"format":"x","version":1})");
    EXPECT_THROW(read_checkpoint(other), DataError);
}

TEST(Trainer, EarlyStoppingRestoresBestParameters) {
    // Validation loss (w - 1)^2 while training pulls w toward 3: the best
    // validation point is passed and training stops after `patience` epochs.
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::scalar(0.0));
    auto step = [&](Tape& t, Var& loss, std::size_t) {
        Var d = add(t.parameter(w), t.constant(Tensor::scalar(-3.0)));
        loss = mul(d, d);
        return LossAndAccuracy{loss.value().item(), 0.0};
    };
    auto eval = [&] { return LossAndAccuracy{(w[0] - 1.0) * (w[0] - 1.0), 0.0}; };
    const auto r = train_with_early_stopping(ps, AdamOptions{.lr = 0.1}, 500, 5, step, eval);
    ASSERT_GT(r.best_epoch, 0u);
    EXPECT_EQ(r.trace.size(), r.best_epoch + 5);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : r.trace) best = std::min(best, s.val_loss);
    EXPECT_DOUBLE_EQ(r.trace[r.best_epoch - 1].val_loss, best);
    EXPECT_DOUBLE_EQ((w[0] - 1.0) * (w[0] - 1.0), best);
}

TEST(Trainer, ZeroEpochsKeepsInitialParameters) {
    ParameterSet ps;
    Tensor& w = ps.add("w", Tensor::scalar(0.25));
    const auto r = train_with_early_stopping(
        ps, AdamOptions{}, 0, 5, [](Tape&, Var&, std::size_t) { return LossAndAccuracy{}; },
        [] { return LossAndAccuracy{}; });
    EXPECT_TRUE(r.trace.empty());
    EXPECT_EQ(r.best_epoch, 0u);
    EXPECT_DOUBLE_EQ(w[0], 0.25);
}
