#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "oncograph/baselines/common.hpp"
#include "oncograph/core/checkpoint.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/parameters.hpp"
#include "oncograph/core/trainer.hpp"
#include "oncograph/gnn/config.hpp"
#include "oncograph/gnn/layers.hpp"

namespace oncograph {

struct MlpConfig {
    std::size_t hidden_dim = 64;
    Activation activation = Activation::relu;
    double dropout = 0.0;
    double lr = 0.01;
    double weight_decay = 5e-4;
    std::size_t epochs = 200;
    std::size_t patience = 30;
    std::uint64_t seed = 42;

    void validate() const {
        if (hidden_dim < 1) throw ConfigError("MLP hidden_dim must be at least 1");
        if (!(lr > 0.0)) throw ConfigError("MLP lr must be positive");
        if (!(weight_decay >= 0.0)) throw ConfigError("MLP weight_decay must be nonnegative");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("MLP dropout must lie in [0, 1)");
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["hidden_dim"] = hidden_dim;
        j["activation"] = std::string(to_string(activation));
        j["dropout"] = dropout;
        j["lr"] = lr;
        j["weight_decay"] = weight_decay;
        j["epochs"] = epochs;
        j["patience"] = patience;
        j["seed"] = seed;
        return j;
    }

    static MlpConfig from_json(const nlohmann::ordered_json& j) {
        MlpConfig c;
        c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
        const auto act = parse_activation(j.value("activation", std::string("relu")));
        if (!act) throw ConfigError("unknown activation");
        c.activation = *act;
        c.dropout = j.value("dropout", c.dropout);
        c.lr = j.value("lr", c.lr);
        c.weight_decay = j.value("weight_decay", c.weight_decay);
        c.epochs = j.value("epochs", c.epochs);
        c.patience = j.value("patience", c.patience);
        c.seed = j.value("seed", c.seed);
        c.validate();
        return c;
    }
};

/// One-hidden-layer perceptron: x -> act(x W1 + b1) -> W2 + b2.
class Mlp {
public:
    Mlp(MlpConfig config, std::size_t in_features, std::size_t num_classes)
        : config_(config), in_features_(in_features), num_classes_(num_classes) {
        config_.validate();
        if (in_features == 0 || num_classes == 0) throw ConfigError("MLP needs features and classes");
        Rng rng(mix_seed(config_.seed, 0x3170));
        params_.add("hidden.weight", glorot(in_features, config_.hidden_dim, rng));
        params_.add("hidden.bias", Tensor({1, config_.hidden_dim}));
        params_.add("out.weight", glorot(config_.hidden_dim, num_classes, rng));
        params_.add("out.bias", Tensor({1, num_classes}));
    }

    const MlpConfig& config() const noexcept { return config_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    ParameterSet& params() noexcept { return params_; }
    const ParameterSet& params() const noexcept { return params_; }
    std::vector<EpochStats>& trace() noexcept { return trace_; }
    const std::vector<EpochStats>& trace() const noexcept { return trace_; }

    Var forward(Tape& tape, const Tensor& x, bool training = false, std::uint64_t dropout_seed = 0) const {
        if (x.cols() != in_features_) throw DimensionError("MLP input width differs from the model's");
        auto p = [&](const char* name) { return tape.parameter(const_cast<Tensor&>(params_.at(name))); };
        Var h = dropout(tape.constant(x), config_.dropout, mix_seed(dropout_seed, 0), training);
        h = activate(linear(h, p("hidden.weight"), p("hidden.bias")), config_.activation);
        h = dropout(h, config_.dropout, mix_seed(dropout_seed, 1), training);
        return linear(h, p("out.weight"), p("out.bias"));
    }

    Tensor predict_proba(const Tensor& x) const {
        Tape tape;
        return softmax_rows(forward(tape, x).value());
    }

    std::vector<int> predict(const Tensor& x) const { return argmax_rows(predict_proba(x)); }

    Checkpoint to_checkpoint(std::uint64_t vocab_hash = 0) const {
        Checkpoint c;
        c.kind = "mlp";
        c.vocab_hash = vocab_hash;
        c.config = config_.to_json();
        c.payload["in_features"] = in_features_;
        c.payload["num_classes"] = num_classes_;
        for (const auto& [name, t] : params_) c.tensors.emplace_back(name, t.detached());
        return c;
    }

    static Mlp from_checkpoint(const Checkpoint& c) {
        if (c.kind != "mlp") throw DataError("checkpoint kind '" + c.kind + "' is not an MLP");
        Mlp m(MlpConfig::from_json(c.config), c.payload.at("in_features").get<std::size_t>(),
              c.payload.at("num_classes").get<std::size_t>());
        for (auto& [name, t] : m.params_) {
            const Tensor& saved = c.tensor(name);
            if (saved.shape() != t.shape()) throw DataError("checkpoint tensor '" + name + "' has the wrong shape");
            std::copy(saved.values().begin(), saved.values().end(), t.values().begin());
        }
        return m;
    }

private:
    MlpConfig config_;
    std::size_t in_features_;
    std::size_t num_classes_;
    ParameterSet params_;
    std::vector<EpochStats> trace_;
};

/// Adam on the cross-entropy of the train rows with early stopping on the val rows.
inline Mlp mlp_fit(const Tensor& x, std::span<const int> y, std::span<const std::size_t> train_rows,
                   std::span<const std::size_t> val_rows, std::size_t num_classes = 7, const MlpConfig& config = {}) {
    check_labels(y, x.rows(), num_classes);
    if (train_rows.empty()) throw ConfigError("train mask has no labeled rows");
    if (val_rows.empty()) throw ConfigError("validation mask has no labeled rows");
    auto labels_of = [&](std::span<const std::size_t> rows) {
        std::vector<int> out;
        for (std::size_t r : rows) {
            if (r >= x.rows()) throw ConfigError("mask refers to a missing row");
            out.push_back(y[r]);
        }
        return out;
    };
    const std::vector<int> y_train = labels_of(train_rows);
    const std::vector<int> y_val = labels_of(val_rows);

    Mlp model(config, x.cols(), num_classes);
    AdamOptions adam;
    adam.lr = config.lr;
    adam.weight_decay = config.weight_decay;
    auto result = train_with_early_stopping(
        model.params(), adam, config.epochs, config.patience,
        [&](Tape& tape, Var& loss, std::size_t epoch) {
            Var z = model.forward(tape, x, true, mix_seed(config.seed, epoch));
            loss = cross_entropy(z, train_rows, y_train);
            return LossAndAccuracy{loss.value().item(), argmax_accuracy(z.value(), train_rows, y_train)};
        },
        [&] {
            Tape tape;
            Var z = model.forward(tape, x);
            return LossAndAccuracy{cross_entropy(z, val_rows, y_val).value().item(),
                                   argmax_accuracy(z.value(), val_rows, y_val)};
        });
    model.trace() = std::move(result.trace);
    return model;
}

} // namespace oncograph
