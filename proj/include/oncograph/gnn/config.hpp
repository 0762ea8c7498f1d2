#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "oncograph/core/error.hpp"

namespace oncograph {

enum class Operator { agnn, chebnet, gcn, gat, gin, graphsage, sgc, tagcn };

inline constexpr std::array<Operator, 8> kAllOperators = {Operator::agnn, Operator::chebnet, Operator::gcn,
                                                          Operator::gat,  Operator::gin,     Operator::graphsage,
                                                          Operator::sgc,  Operator::tagcn};

inline std::string_view to_string(Operator op) {
    constexpr std::array<std::string_view, 8> keys = {"agnn", "chebnet", "gcn", "gat",
                                                      "gin",  "graphsage", "sgc", "tagcn"};
    return keys[static_cast<std::size_t>(op)];
}

inline std::string_view display_name(Operator op) {
    constexpr std::array<std::string_view, 8> names = {"AGNN", "ChebNet",   "GCN", "GAT",
                                                       "GIN",  "GraphSAGE", "SGC", "TAGCN"};
    return names[static_cast<std::size_t>(op)];
}

inline std::optional<Operator> parse_operator(std::string_view key) {
    for (Operator op : kAllOperators)
        if (to_string(op) == key) return op;
    return std::nullopt;
}

enum class Activation { relu, elu, tanh, sigmoid, identity };

inline std::string_view to_string(Activation a) {
    constexpr std::array<std::string_view, 5> keys = {"relu", "elu", "tanh", "sigmoid", "identity"};
    return keys[static_cast<std::size_t>(a)];
}

inline std::optional<Activation> parse_activation(std::string_view key) {
    for (Activation a : {Activation::relu, Activation::elu, Activation::tanh, Activation::sigmoid,
                         Activation::identity})
        if (to_string(a) == key) return a;
    return std::nullopt;
}

enum class GinAggregation { mean, sum };

/// Hyperparameters of one GNN run.
struct ModelConfig {
    Operator op = Operator::gcn;
    std::size_t hidden_dim = 64;
    std::size_t num_layers = 2;
    /// Polynomial order; 0 selects the operator default (ChebNet 3, TAGCN 2, SGC 2).
    std::size_t order = 0;
    std::size_t heads = 8;
    /// GAT hidden layers concatenate heads when true, average them otherwise.
    bool gat_concat_hidden = true;
    bool epsilon_learnable = true;
    GinAggregation gin_aggregation = GinAggregation::mean;
    double agnn_beta = 1.0;
    Activation activation = Activation::relu;
    double dropout = 0.0;
    double lr = 0.01;
    double weight_decay = 5e-4;
    std::size_t epochs = 200;
    std::size_t patience = 30;
    std::uint64_t seed = 42;

    static ModelConfig defaults_for(Operator op) {
        ModelConfig c;
        c.op = op;
        return c;
    }

    std::size_t resolved_order() const {
        if (order != 0) return order;
        switch (op) {
        case Operator::chebnet: return 3;
        case Operator::tagcn: return 2;
        case Operator::sgc: return 2;
        default: return 1;
        }
    }

    void validate() const {
        if (hidden_dim < 1) throw ConfigError("hidden_dim must be at least 1");
        if (num_layers < 1) throw ConfigError("num_layers must be at least 1");
        if (heads < 1) throw ConfigError("heads must be at least 1");
        if (!(lr > 0.0)) throw ConfigError("lr must be positive");
        if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be nonnegative");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["operator"] = std::string(to_string(op));
        j["hidden_dim"] = hidden_dim;
        j["num_layers"] = num_layers;
        j["order"] = resolved_order();
        j["heads"] = heads;
        j["gat_concat_hidden"] = gat_concat_hidden;
        j["epsilon_learnable"] = epsilon_learnable;
        j["gin_aggregation"] = gin_aggregation == GinAggregation::mean ? "mean" : "sum";
        j["agnn_beta"] = agnn_beta;
        j["activation"] = std::string(to_string(activation));
        j["dropout"] = dropout;
        j["lr"] = lr;
        j["weight_decay"] = weight_decay;
        j["epochs"] = epochs;
        j["patience"] = patience;
        j["seed"] = seed;
        return j;
    }

    static ModelConfig from_json(const nlohmann::ordered_json& j) {
        ModelConfig c;
        const auto op = parse_operator(j.at("operator").get<std::string>());
        if (!op) throw ConfigError("unknown operator '" + j.at("operator").get<std::string>() + "'");
        c.op = *op;
        c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
        c.num_layers = j.value("num_layers", c.num_layers);
        c.order = j.value("order", c.order);
        c.heads = j.value("heads", c.heads);
        c.gat_concat_hidden = j.value("gat_concat_hidden", c.gat_concat_hidden);
        c.epsilon_learnable = j.value("epsilon_learnable", c.epsilon_learnable);
        c.gin_aggregation = j.value("gin_aggregation", std::string("mean")) == "sum" ? GinAggregation::sum
                                                                                    : GinAggregation::mean;
        c.agnn_beta = j.value("agnn_beta", c.agnn_beta);
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

} // namespace oncograph
