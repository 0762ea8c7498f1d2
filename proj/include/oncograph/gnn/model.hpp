#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oncograph/core/checkpoint.hpp"
#include "oncograph/core/error.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/parameters.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/core/tape.hpp"
#include "oncograph/gnn/config.hpp"
#include "oncograph/gnn/layers.hpp"
#include "oncograph/graph/feature_graph.hpp"
#include "oncograph/graph/operators.hpp"

namespace oncograph {

/// Sparse operators derived once per graph and shared by every epoch.
struct GraphContext {
    std::size_t num_nodes = 0;
    SparseMatrix adjacency;       ///< D^-1/2 (A + I) D^-1/2
    SparseMatrix laplacian;       ///< scaled Laplacian, lambda_max = 2
    SparseMatrix neighbors;       ///< A
    SparseMatrix support;         ///< A + I pattern
    SparseMatrix gin_aggregation; ///< D^-1 A (mean) or A (sum)
    SparseMatrix mean_self;       ///< D^-1 (A + I)

    static GraphContext build(const FeatureGraph& g, const ModelConfig& config) {
        GraphContext ctx;
        ctx.num_nodes = g.num_nodes();
        switch (config.op) {
        case Operator::gcn:
        case Operator::sgc:
        case Operator::tagcn: ctx.adjacency = normalize_adjacency(g).matrix; break;
        case Operator::chebnet: ctx.laplacian = scaled_laplacian(g, LambdaMaxMode::fixed).matrix; break;
        case Operator::agnn: ctx.neighbors = g.adjacency(); break;
        case Operator::gat: ctx.support = self_loop_pattern(g); break;
        case Operator::gin:
            ctx.gin_aggregation =
                config.gin_aggregation == GinAggregation::mean ? mean_aggregation(g, false) : g.adjacency();
            break;
        case Operator::graphsage: ctx.mean_self = mean_aggregation(g, true); break;
        }
        return ctx;
    }
};

struct ForwardOptions {
    bool training = false;
    std::uint64_t dropout_seed = 0;
    /// When set, receives the node states after each graph layer.
    std::vector<Tensor>* hidden_states = nullptr;
};

/// Parameters and forward pass of one of the eight operators.
///
/// Layout (L = num_layers, H = hidden_dim, C = classes):
///   GCN, ChebNet, GraphSAGE, TAGCN, GIN: L graph layers with activation, then a linear head.
///   GAT: L attention layers; hidden ones concatenate heads (H / heads per head),
///        the last averages heads and emits class scores.
///   AGNN: input projection with activation, L propagation steps, linear head.
///   SGC: adj^K x W, no bias and no nonlinearity.
class GnnModel {
public:
    GnnModel(ModelConfig config, std::size_t in_features, std::size_t num_classes, std::uint64_t vocab_hash = 0)
        : config_(std::move(config)), in_features_(in_features), num_classes_(num_classes), vocab_hash_(vocab_hash) {
        config_.validate();
        if (in_features_ == 0 || num_classes_ == 0) throw ConfigError("model needs features and classes");
        init_parameters();
    }

    const ModelConfig& config() const noexcept { return config_; }
    std::size_t in_features() const noexcept { return in_features_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::uint64_t vocab_hash() const noexcept { return vocab_hash_; }
    ParameterSet& params() noexcept { return params_; }
    const ParameterSet& params() const noexcept { return params_; }

    /// Class scores for every node.
    Var forward(Tape& tape, const GraphContext& ctx, const Tensor& x, const ForwardOptions& opts = {}) const {
        if (x.rows() != ctx.num_nodes) throw DimensionError("feature rows differ from node count");
        if (x.cols() != in_features_) throw DimensionError("feature width differs from the model input width");
        if (config_.op == Operator::sgc) {
            return sgc_logits(tape, sgc_propagate(ctx.adjacency, x, config_.resolved_order()));
        }
        Bound b{tape, params_};
        Var h = tape.constant(x);
        switch (config_.op) {
        case Operator::gcn:
        case Operator::chebnet:
        case Operator::graphsage:
        case Operator::tagcn:
        case Operator::gin:
            for (std::size_t l = 0; l < config_.num_layers; ++l) {
                h = drop(h, opts, l);
                h = activate(graph_layer(b, ctx, h, l), config_.activation);
                record(opts, h);
            }
            return linear(h, b("head.weight"), b("head.bias"));
        case Operator::gat:
            for (std::size_t l = 0; l < config_.num_layers; ++l) {
                h = drop(h, opts, l);
                const bool last = l + 1 == config_.num_layers;
                std::vector<GatHead> heads;
                for (std::size_t k = 0; k < config_.heads; ++k) {
                    const std::string p = prefix(l) + "head" + std::to_string(k) + ".";
                    heads.push_back({b(p + "weight"), b(p + "att_src"), b(p + "att_dst")});
                }
                h = add(gat_layer(ctx.support, h, heads, !last && config_.gat_concat_hidden).out,
                        b(prefix(l) + "bias"));
                if (!last) h = activate(h, config_.activation);
                record(opts, h);
            }
            return h;
        case Operator::agnn:
            h = activate(linear(drop(h, opts, 0), b("input.weight"), b("input.bias")), config_.activation);
            record(opts, h);
            for (std::size_t l = 0; l < config_.num_layers; ++l) {
                h = agnn_propagate(ctx.neighbors, h, b(prefix(l) + "beta")).out;
                record(opts, h);
            }
            return linear(drop(h, opts, config_.num_layers), b("head.weight"), b("head.bias"));
        case Operator::sgc: break;
        }
        throw UsageError("unhandled operator");
    }

    /// SGC scores from features already propagated by sgc_propagate.
    Var sgc_logits(Tape& tape, const Tensor& propagated) const {
        Bound b{tape, params_};
        return matmul(tape.constant(propagated), b("weight"));
    }

    Checkpoint to_checkpoint() const {
        Checkpoint c;
        c.kind = "gnn";
        c.vocab_hash = vocab_hash_;
        c.config = config_.to_json();
        c.payload["in_features"] = in_features_;
        c.payload["num_classes"] = num_classes_;
        for (const auto& [name, t] : params_) c.tensors.emplace_back(name, t.detached());
        return c;
    }

    static GnnModel from_checkpoint(const Checkpoint& c) {
        if (c.kind != "gnn") throw DataError("checkpoint kind '" + c.kind + "' is not a GNN");
        GnnModel m(ModelConfig::from_json(c.config), c.payload.at("in_features").get<std::size_t>(),
                   c.payload.at("num_classes").get<std::size_t>(), c.vocab_hash);
        for (auto& [name, t] : m.params_) {
            const Tensor& saved = c.tensor(name);
            if (saved.shape() != t.shape()) throw DataError("checkpoint tensor '" + name + "' has the wrong shape");
            std::copy(saved.values().begin(), saved.values().end(), t.values().begin());
        }
        return m;
    }

private:
    struct Bound {
        Tape& tape;
        const ParameterSet& params;
        Var operator()(const std::string& name) const {
            return tape.parameter(const_cast<Tensor&>(params.at(name)));
        }
    };

    static std::string prefix(std::size_t l) { return "layer" + std::to_string(l) + "."; }

    Var drop(Var h, const ForwardOptions& opts, std::size_t layer) const {
        return dropout(h, config_.dropout, mix_seed(opts.dropout_seed, layer), opts.training);
    }

    static void record(const ForwardOptions& opts, Var h) {
        if (opts.hidden_states) opts.hidden_states->push_back(h.value().detached());
    }

    Var graph_layer(const Bound& b, const GraphContext& ctx, Var h, std::size_t l) const {
        const std::string p = prefix(l);
        switch (config_.op) {
        case Operator::gcn: return gcn_layer(ctx.adjacency, h, b(p + "weight"), b(p + "bias"));
        case Operator::graphsage: return sage_layer(ctx.mean_self, h, b(p + "weight"), b(p + "bias"));
        case Operator::chebnet: {
            std::vector<Var> theta;
            for (std::size_t k = 0; k < config_.resolved_order(); ++k) theta.push_back(b(p + "theta" + std::to_string(k)));
            return cheb_layer(ctx.laplacian, h, theta, b(p + "bias"));
        }
        case Operator::tagcn: {
            std::vector<Var> weights;
            for (std::size_t k = 0; k <= config_.resolved_order(); ++k)
                weights.push_back(b(p + "hop" + std::to_string(k)));
            return tagcn_layer(ctx.adjacency, h, weights, b(p + "bias"));
        }
        case Operator::gin: {
            std::optional<Var> eps;
            if (config_.epsilon_learnable) eps = b(p + "eps");
            Var z = gin_combine(ctx.gin_aggregation, h, eps);
            z = activate(linear(z, b(p + "mlp0.weight"), b(p + "mlp0.bias")), config_.activation);
            return linear(z, b(p + "mlp1.weight"), b(p + "mlp1.bias"));
        }
        default: throw UsageError("operator has no generic graph layer");
        }
    }

    void init_parameters() {
        Rng rng(mix_seed(config_.seed, 0x1417));
        const std::size_t hidden = config_.hidden_dim;
        const std::size_t classes = num_classes_;
        auto weight = [&](const std::string& name, std::size_t in, std::size_t out) {
            params_.add(name, glorot(in, out, rng));
        };
        auto bias = [&](const std::string& name, std::size_t width) { params_.add(name, Tensor({1, width})); };

        switch (config_.op) {
        case Operator::sgc: weight("weight", in_features_, classes); return;
        case Operator::agnn:
            weight("input.weight", in_features_, hidden);
            bias("input.bias", hidden);
            for (std::size_t l = 0; l < config_.num_layers; ++l)
                params_.add(prefix(l) + "beta", Tensor({1, 1}, {config_.agnn_beta}));
            weight("head.weight", hidden, classes);
            bias("head.bias", classes);
            return;
        case Operator::gat: {
            const std::size_t per_head =
                config_.gat_concat_hidden ? std::max<std::size_t>(1, hidden / config_.heads) : hidden;
            const std::size_t hidden_width = config_.gat_concat_hidden ? per_head * config_.heads : per_head;
            std::size_t in = in_features_;
            for (std::size_t l = 0; l < config_.num_layers; ++l) {
                const bool last = l + 1 == config_.num_layers;
                const std::size_t d = last ? classes : per_head;
                for (std::size_t k = 0; k < config_.heads; ++k) {
                    const std::string p = prefix(l) + "head" + std::to_string(k) + ".";
                    weight(p + "weight", in, d);
                    weight(p + "att_src", d, 1);
                    weight(p + "att_dst", d, 1);
                }
                bias(prefix(l) + "bias", last ? classes : hidden_width);
                in = hidden_width;
            }
            return;
        }
        default: break;
        }

        std::size_t in = in_features_;
        for (std::size_t l = 0; l < config_.num_layers; ++l) {
            const std::string p = prefix(l);
            switch (config_.op) {
            case Operator::gcn:
            case Operator::graphsage: weight(p + "weight", in, hidden); break;
            case Operator::chebnet:
                for (std::size_t k = 0; k < config_.resolved_order(); ++k)
                    weight(p + "theta" + std::to_string(k), in, hidden);
                break;
            case Operator::tagcn:
                for (std::size_t k = 0; k <= config_.resolved_order(); ++k)
                    weight(p + "hop" + std::to_string(k), in, hidden);
                break;
            case Operator::gin:
                if (config_.epsilon_learnable) params_.add(p + "eps", Tensor({1, 1}));
                weight(p + "mlp0.weight", in, hidden);
                bias(p + "mlp0.bias", hidden);
                weight(p + "mlp1.weight", hidden, hidden);
                bias(p + "mlp1.bias", hidden);
                break;
            default: break;
            }
            if (config_.op != Operator::gin) bias(p + "bias", hidden);
            in = hidden;
        }
        weight("head.weight", hidden, classes);
        bias("head.bias", classes);
    }

    ModelConfig config_;
    std::size_t in_features_;
    std::size_t num_classes_;
    std::uint64_t vocab_hash_;
    ParameterSet params_;
};

struct Prediction {
    std::vector<std::size_t> nodes; ///< patient node ids, in graph order
    std::vector<int> classes;       ///< argmax class per patient; ties go to the lowest index
    Tensor probabilities;           ///< [patients x classes], rows sum to 1
};

/// Index of the largest entry; the first one wins ties.
inline int argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j)
        if (row[j] > row[best]) best = j;
    return static_cast<int>(best);
}

/// Class probabilities for the listed nodes (all patient nodes by default).
inline Prediction predict(const GnnModel& model, const FeatureGraph& g,
                          std::optional<std::vector<std::size_t>> nodes = std::nullopt) {
    if (model.vocab_hash() != g.vocab_hash()) throw DataError("graph vocabulary differs from the model's");
    if (model.in_features() != g.num_features()) throw DataError("graph feature width differs from the model's");
    Prediction p;
    p.nodes = nodes ? std::move(*nodes) : g.patient_nodes();
    if (p.nodes.empty()) throw UsageError("nothing to predict: no patient nodes");
    const GraphContext ctx = GraphContext::build(g, model.config());
    Tape tape;
    const Tensor logits = model.forward(tape, ctx, g.features()).value().detached();
    Tensor rows({p.nodes.size(), logits.cols()});
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const auto src = logits.row(p.nodes[i]);
        std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
    p.probabilities = softmax_rows(rows);
    for (std::size_t i = 0; i < p.nodes.size(); ++i) p.classes.push_back(argmax(p.probabilities.row(i)));
    return p;
}

} // namespace oncograph
