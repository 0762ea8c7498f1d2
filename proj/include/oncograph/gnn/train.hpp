#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/trainer.hpp"
#include "oncograph/gnn/model.hpp"
#include "oncograph/graph/feature_graph.hpp"

namespace oncograph {

/// Node indices of the graph used for training, early stopping and testing.
struct TrainingMasks {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

struct TrainedModel {
    GnnModel model;
    std::vector<EpochStats> trace;
    std::size_t best_epoch = 0;
    double seconds = 0.0;
};

namespace detail {

inline std::vector<int> mask_labels(const FeatureGraph& g, const std::vector<std::size_t>& mask, const char* name,
                                    std::size_t classes) {
    if (mask.empty()) throw ConfigError(std::string(name) + " mask has no labeled nodes");
    std::vector<int> y;
    y.reserve(mask.size());
    for (std::size_t i : mask) {
        if (i >= g.num_nodes()) throw ConfigError(std::string(name) + " mask refers to a missing node");
        const int label = g.labels()[i];
        if (label < 0) throw ConfigError(std::string(name) + " mask contains an unlabeled node");
        if (static_cast<std::size_t>(label) >= classes) throw DataError("label outside the class range");
        y.push_back(label);
    }
    return y;
}

} // namespace detail

/// Full-batch training of one operator on the labeled nodes of g.
inline TrainedModel train_model(const FeatureGraph& g, const TrainingMasks& masks, const ModelConfig& config,
                                std::size_t num_classes = 7) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int> y_train = detail::mask_labels(g, masks.train, "train", num_classes);
    const std::vector<int> y_val = detail::mask_labels(g, masks.val, "validation", num_classes);

    TrainedModel out{GnnModel(config, g.num_features(), num_classes, g.vocab_hash()), {}, 0, 0.0};
    GnnModel& model = out.model;
    const GraphContext ctx = GraphContext::build(g, config);
    // SGC has no parameters before its linear map, so the propagation is computed once.
    Tensor propagated;
    if (config.op == Operator::sgc) propagated = sgc_propagate(ctx.adjacency, g.features(), config.resolved_order());

    auto logits = [&](Tape& tape, bool training, std::size_t epoch) {
        if (config.op == Operator::sgc) return model.sgc_logits(tape, propagated);
        ForwardOptions opts;
        opts.training = training;
        opts.dropout_seed = mix_seed(config.seed, epoch);
        return model.forward(tape, ctx, g.features(), opts);
    };

    AdamOptions adam;
    adam.lr = config.lr;
    adam.weight_decay = config.weight_decay;
    auto result = train_with_early_stopping(
        model.params(), adam, config.epochs, config.patience,
        [&](Tape& tape, Var& loss, std::size_t epoch) {
            Var z = logits(tape, true, epoch);
            loss = cross_entropy(z, masks.train, y_train);
            return LossAndAccuracy{loss.value().item(), argmax_accuracy(z.value(), masks.train, y_train)};
        },
        [&] {
            Tape tape;
            Var z = logits(tape, false, 0);
            const double loss = cross_entropy(z, masks.val, y_val).value().item();
            return LossAndAccuracy{loss, argmax_accuracy(z.value(), masks.val, y_val)};
        });
    out.trace = std::move(result.trace);
    out.best_epoch = result.best_epoch;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace oncograph
