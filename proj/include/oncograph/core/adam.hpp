#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

struct AdamOptions {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

/// Moment buffers and step counter for Adam with decoupled weight decay.
class AdamState {
public:
    explicit AdamState(AdamOptions options = {}) : options_(options) {
        if (!(options_.lr > 0.0)) throw ConfigError("Adam learning rate must be positive");
    }

    const AdamOptions& options() const noexcept { return options_; }
    std::size_t step_count() const noexcept { return steps_; }
    std::span<const double> first_moment(std::size_t i) const { return m_.at(i); }
    std::span<const double> second_moment(std::size_t i) const { return v_.at(i); }

    /// One update of every parameter from its grad slot (missing grad reads as zero).
    ///
    ///   p <- p - lr * wd * p
    ///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
    ///   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
    void step(std::span<Tensor* const> params) {
        if (m_.empty()) {
            for (const Tensor* p : params) {
                m_.emplace_back(p->size(), 0.0);
                v_.emplace_back(p->size(), 0.0);
            }
        }
        if (params.size() != m_.size()) throw DimensionError("Adam parameter count changed between steps");
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i]->size() != m_[i].size()) throw DimensionError("Adam parameter shape changed between steps");
        }
        ++steps_;
        const auto t = static_cast<double>(steps_);
        const double c1 = 1.0 - std::pow(options_.beta1, t);
        const double c2 = 1.0 - std::pow(options_.beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i];
            const auto g = p.grad();
            auto w = p.values();
            auto& m = m_[i];
            auto& v = v_[i];
            for (std::size_t k = 0; k < w.size(); ++k) {
                const double gk = g.empty() ? 0.0 : g[k];
                w[k] -= options_.lr * options_.weight_decay * w[k];
                m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * gk;
                v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * gk * gk;
                const double mh = m[k] / c1;
                const double vh = v[k] / c2;
                w[k] -= options_.lr * mh / (std::sqrt(vh) + options_.epsilon);
            }
            p.check_finite("adam_step");
        }
    }

private:
    AdamOptions options_;
    std::size_t steps_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

inline void adam_step(AdamState& state, std::span<Tensor* const> params) { state.step(params); }

} // namespace oncograph
