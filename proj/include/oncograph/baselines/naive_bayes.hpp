#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "oncograph/baselines/common.hpp"
#include "oncograph/core/checkpoint.hpp"

namespace oncograph {

/// Bernoulli naive Bayes with Laplace smoothing alpha = 1.
///
/// theta[c][f] = (n_cf + 1) / (n_c + 2). A class with no training samples has
/// log prior -inf and is never predicted.
class NaiveBayes {
public:
    NaiveBayes() = default;

    static NaiveBayes fit(const Tensor& x, std::span<const int> y, std::size_t num_classes = 7) {
        check_binary_matrix(x);
        check_labels(y, x.rows(), num_classes);
        NaiveBayes nb;
        const std::size_t f = x.cols();
        std::vector<double> n(num_classes, 0.0);
        Tensor ones({num_classes, f});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto c = static_cast<std::size_t>(y[i]);
            n[c] += 1.0;
            for (std::size_t j = 0; j < f; ++j) ones(c, j) += x(i, j);
        }
        const double m = static_cast<double>(x.rows());
        nb.log_prior_.resize(num_classes);
        nb.log_p1_ = Tensor({num_classes, f});
        nb.log_p0_ = Tensor({num_classes, f});
        for (std::size_t c = 0; c < num_classes; ++c) {
            nb.log_prior_[c] = n[c] > 0.0 ? std::log(n[c] / m) : -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < f; ++j) {
                const double theta = (ones(c, j) + 1.0) / (n[c] + 2.0);
                nb.log_p1_(c, j) = std::log(theta);
                nb.log_p0_(c, j) = std::log1p(-theta);
            }
        }
        return nb;
    }

    std::size_t num_classes() const noexcept { return log_prior_.size(); }
    std::size_t num_features() const noexcept { return log_p1_.cols(); }
    const std::vector<double>& log_prior() const noexcept { return log_prior_; }
    double log_likelihood(std::size_t c, std::size_t f, bool present) const {
        return present ? log_p1_(c, f) : log_p0_(c, f);
    }

    /// Unnormalized log posterior: log prior + sum of feature log likelihoods.
    Tensor joint_log_likelihood(const Tensor& x) const {
        if (x.cols() != num_features()) throw DimensionError("row width differs from the training width");
        Tensor out({x.rows(), num_classes()});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t c = 0; c < num_classes(); ++c) {
                double s = log_prior_[c];
                if (std::isinf(s)) {
                    out(i, c) = s;
                    continue;
                }
                for (std::size_t j = 0; j < num_features(); ++j) s += x(i, j) != 0.0 ? log_p1_(c, j) : log_p0_(c, j);
                out(i, c) = s;
            }
        }
        return out;
    }

    Tensor predict_proba(const Tensor& x) const {
        Tensor jll = joint_log_likelihood(x);
        Tensor out({x.rows(), num_classes()});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (double v : jll.row(i)) mx = std::max(mx, v);
            double z = 0.0;
            for (std::size_t c = 0; c < num_classes(); ++c) z += std::exp(jll(i, c) - mx);
            for (std::size_t c = 0; c < num_classes(); ++c) out(i, c) = std::exp(jll(i, c) - mx) / z;
        }
        return out;
    }

    /// Argmax of the joint log likelihood; ties go to the lowest class index.
    std::vector<int> predict(const Tensor& x) const { return argmax_rows(joint_log_likelihood(x)); }

    Checkpoint to_checkpoint(std::uint64_t vocab_hash = 0) const {
        Checkpoint c;
        c.kind = "naive_bayes";
        c.vocab_hash = vocab_hash;
        // -inf (absent class) is stored as null.
        nlohmann::ordered_json priors = nlohmann::ordered_json::array();
        for (double v : log_prior_) priors.push_back(std::isinf(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v));
        c.payload["log_prior"] = std::move(priors);
        c.tensors.emplace_back("log_p1", log_p1_);
        c.tensors.emplace_back("log_p0", log_p0_);
        return c;
    }

    static NaiveBayes from_checkpoint(const Checkpoint& c) {
        if (c.kind != "naive_bayes") throw DataError("checkpoint kind '" + c.kind + "' is not naive bayes");
        NaiveBayes nb;
        for (const auto& p : c.payload.at("log_prior"))
            nb.log_prior_.push_back(p.is_null() ? -std::numeric_limits<double>::infinity() : p.get<double>());
        nb.log_p1_ = c.tensor("log_p1");
        nb.log_p0_ = c.tensor("log_p0");
        if (nb.log_p1_.rows() != nb.log_prior_.size() || nb.log_p0_.shape() != nb.log_p1_.shape())
            throw DataError("naive bayes checkpoint tensors have inconsistent shapes");
        return nb;
    }

private:
    std::vector<double> log_prior_;
    Tensor log_p1_;
    Tensor log_p0_;
};

} // namespace oncograph
