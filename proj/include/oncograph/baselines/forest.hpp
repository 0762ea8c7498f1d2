#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "oncograph/baselines/tree.hpp"

namespace oncograph {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;
    /// Features tried per split; 0 selects floor(sqrt(F)).
    std::size_t max_features = 0;
    bool bootstrap = true;
    std::uint64_t seed = 42;

    void validate() const {
        if (n_trees < 1) throw ConfigError("forest needs at least one tree");
    }
};

/// Bagged Gini trees with per-split feature subsampling and majority voting.
class RandomForest {
public:
    RandomForest() = default;

    static RandomForest fit(const Tensor& x, std::span<const int> y, std::size_t num_classes = 7,
                            const ForestConfig& config = {}) {
        config.validate();
        check_binary_matrix(x);
        check_labels(y, x.rows(), num_classes);
        RandomForest f;
        f.num_classes_ = num_classes;
        const std::size_t m = x.rows();
        TreeOptions opts;
        opts.max_depth = config.max_depth;
        opts.max_features = config.max_features != 0
                                ? config.max_features
                                : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
        for (std::size_t t = 0; t < config.n_trees; ++t) {
            Rng rng(mix_seed(config.seed, 2 * t));
            std::vector<std::size_t> rows(m);
            for (std::size_t i = 0; i < m; ++i) rows[i] = config.bootstrap ? rng.below(m) : i;
            opts.seed = mix_seed(config.seed, 2 * t + 1);
            f.trees_.push_back(DecisionTree::fit_rows(x, y, std::move(rows), num_classes, opts));
        }
        return f;
    }

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    std::size_t num_classes() const noexcept { return num_classes_; }

    /// Fraction of trees voting for each class.
    Tensor predict_proba(const Tensor& x) const {
        Tensor out({x.rows(), num_classes_});
        const double share = 1.0 / static_cast<double>(trees_.size());
        for (const auto& t : trees_) {
            const auto votes = t.predict(x);
            for (std::size_t i = 0; i < x.rows(); ++i) out(i, static_cast<std::size_t>(votes[i])) += share;
        }
        return out;
    }

    /// Majority vote; ties go to the lowest class index.
    std::vector<int> predict(const Tensor& x) const {
        std::vector<int> out;
        std::vector<double> votes(num_classes_);
        std::vector<std::vector<int>> per_tree;
        for (const auto& t : trees_) per_tree.push_back(t.predict(x));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            std::fill(votes.begin(), votes.end(), 0.0);
            for (const auto& p : per_tree) votes[static_cast<std::size_t>(p[i])] += 1.0;
            out.push_back(argmax_lowest(votes));
        }
        return out;
    }

    Checkpoint to_checkpoint(std::uint64_t vocab_hash = 0) const {
        Checkpoint c;
        c.kind = "random_forest";
        c.vocab_hash = vocab_hash;
        c.payload["num_classes"] = num_classes_;
        nlohmann::ordered_json trees = nlohmann::ordered_json::array();
        for (const auto& t : trees_) trees.push_back(t.to_json());
        c.payload["trees"] = std::move(trees);
        return c;
    }

    static RandomForest from_checkpoint(const Checkpoint& c) {
        if (c.kind != "random_forest") throw DataError("checkpoint kind '" + c.kind + "' is not a random forest");
        RandomForest f;
        f.num_classes_ = c.payload.at("num_classes").get<std::size_t>();
        for (const auto& t : c.payload.at("trees")) f.trees_.push_back(DecisionTree::from_json(t));
        if (f.trees_.empty()) throw DataError("forest checkpoint has no trees");
        return f;
    }

    bool operator==(const RandomForest&) const = default;

private:
    std::size_t num_classes_ = 0;
    std::vector<DecisionTree> trees_;
};

} // namespace oncograph
