#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "oncograph/baselines/tree.hpp"
#include "oncograph/core/ops.hpp"

namespace oncograph {

struct BoostingConfig {
    std::size_t n_rounds = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("boosting learning rate must be positive");
        if (max_depth < 1) throw ConfigError("boosting trees need depth at least 1");
    }
};

/// Multiclass gradient boosting with softmax loss: one regression tree per
/// class and round, fitted to y_onehot - p, with one-step Newton leaf values
///   gamma = (K - 1)/K * sum r / sum |r| (1 - |r|)
/// shrunk by the learning rate.
///
/// Scores start at the centered log class priors, so zero rounds predict the
/// priors. A class absent from training starts at log(kPriorFloor).
class GradientBoosting {
public:
    static constexpr double kPriorFloor = 1e-12;

    GradientBoosting() = default;

    /// observer(round, scores) runs after every round with the [m x K] training scores.
    template <class Observer>
    static GradientBoosting fit(const Tensor& x, std::span<const int> y, std::size_t num_classes,
                                const BoostingConfig& config, Observer&& observer) {
        config.validate();
        check_binary_matrix(x);
        check_labels(y, x.rows(), num_classes);
        std::size_t present = 0;
        std::vector<double> counts(num_classes, 0.0);
        for (int c : y) counts[static_cast<std::size_t>(c)] += 1.0;
        for (double c : counts) present += c > 0.0 ? 1 : 0;
        if (present < 2) throw ConfigError("gradient boosting needs at least two classes in the training labels");

        GradientBoosting gb;
        gb.num_classes_ = num_classes;
        gb.num_features_ = x.cols();
        gb.learning_rate_ = config.learning_rate;
        const double m = static_cast<double>(x.rows());
        double mean = 0.0;
        for (double c : counts) mean += std::log(std::max(c / m, kPriorFloor));
        mean /= static_cast<double>(num_classes);
        for (double c : counts) gb.init_.push_back(std::log(std::max(c / m, kPriorFloor)) - mean);

        Tensor scores({x.rows(), num_classes});
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t k = 0; k < num_classes; ++k) scores(i, k) = gb.init_[k];

        const double kk = static_cast<double>(num_classes);
        std::vector<double> residual(x.rows());
        for (std::size_t round = 0; round < config.n_rounds; ++round) {
            const Tensor p = softmax_rows(scores);
            std::vector<RegressionTree> trees;
            for (std::size_t k = 0; k < num_classes; ++k) {
                for (std::size_t i = 0; i < x.rows(); ++i)
                    residual[i] = (y[i] == static_cast<int>(k) ? 1.0 : 0.0) - p(i, k);
                auto newton = [&](std::span<const std::size_t> rows) {
                    double num = 0.0, den = 0.0;
                    for (std::size_t r : rows) {
                        num += residual[r];
                        den += std::abs(residual[r]) * (1.0 - std::abs(residual[r]));
                    }
                    return den < 1e-150 ? 0.0 : (kk - 1.0) / kk * num / den;
                };
                trees.push_back(RegressionTree::fit(x, residual, config.max_depth, newton));
            }
            for (std::size_t k = 0; k < num_classes; ++k)
                for (std::size_t i = 0; i < x.rows(); ++i)
                    scores(i, k) += config.learning_rate * trees[k].predict_row(x.row(i));
            gb.rounds_.push_back(std::move(trees));
            observer(round + 1, static_cast<const Tensor&>(scores));
        }
        return gb;
    }

    static GradientBoosting fit(const Tensor& x, std::span<const int> y, std::size_t num_classes = 7,
                                const BoostingConfig& config = {}) {
        return fit(x, y, num_classes, config, [](std::size_t, const Tensor&) {});
    }

    std::size_t num_rounds() const noexcept { return rounds_.size(); }
    std::size_t num_classes() const noexcept { return num_classes_; }
    const std::vector<double>& initial_scores() const noexcept { return init_; }

    /// Summed scores before the softmax.
    Tensor decision_function(const Tensor& x) const {
        if (x.cols() != num_features_) throw DimensionError("row width differs from the training width");
        Tensor out({x.rows(), num_classes_});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t k = 0; k < num_classes_; ++k) {
                double s = init_[k];
                for (const auto& round : rounds_) s += learning_rate_ * round[k].predict_row(x.row(i));
                out(i, k) = s;
            }
        }
        return out;
    }

    Tensor predict_proba(const Tensor& x) const { return softmax_rows(decision_function(x)); }
    std::vector<int> predict(const Tensor& x) const { return argmax_rows(predict_proba(x)); }

    Checkpoint to_checkpoint(std::uint64_t vocab_hash = 0) const {
        Checkpoint c;
        c.kind = "gradient_boosting";
        c.vocab_hash = vocab_hash;
        c.payload["num_classes"] = num_classes_;
        c.payload["num_features"] = num_features_;
        c.payload["learning_rate"] = learning_rate_;
        c.payload["initial_scores"] = init_;
        nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
        for (const auto& round : rounds_) {
            nlohmann::ordered_json trees = nlohmann::ordered_json::array();
            for (const auto& t : round) trees.push_back(t.to_json());
            rounds.push_back(std::move(trees));
        }
        c.payload["rounds"] = std::move(rounds);
        return c;
    }

    static GradientBoosting from_checkpoint(const Checkpoint& c) {
        if (c.kind != "gradient_boosting") throw DataError("checkpoint kind '" + c.kind + "' is not gradient boosting");
        GradientBoosting gb;
        gb.num_classes_ = c.payload.at("num_classes").get<std::size_t>();
        gb.num_features_ = c.payload.at("num_features").get<std::size_t>();
        gb.learning_rate_ = c.payload.at("learning_rate").get<double>();
        gb.init_ = c.payload.at("initial_scores").get<std::vector<double>>();
        if (gb.init_.size() != gb.num_classes_) throw DataError("boosting checkpoint has the wrong prior count");
        for (const auto& round : c.payload.at("rounds")) {
            std::vector<RegressionTree> trees;
            for (const auto& t : round) trees.push_back(RegressionTree::from_json(t, gb.num_features_));
            if (trees.size() != gb.num_classes_) throw DataError("boosting round has the wrong tree count");
            gb.rounds_.push_back(std::move(trees));
        }
        return gb;
    }

    bool operator==(const GradientBoosting&) const = default;

private:
    std::size_t num_classes_ = 0;
    std::size_t num_features_ = 0;
    double learning_rate_ = 0.1;
    std::vector<double> init_;
    std::vector<std::vector<RegressionTree>> rounds_;
};

/// Mean negative log-likelihood of y under softmax(scores).
inline double softmax_log_loss(const Tensor& scores, std::span<const int> y) {
    const Tensor p = softmax_rows(scores);
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) loss -= std::log(p(i, static_cast<std::size_t>(y[i])));
    return loss / static_cast<double>(y.size());
}

} // namespace oncograph
