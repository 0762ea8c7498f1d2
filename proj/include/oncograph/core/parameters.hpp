#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

/// Named learnable tensors in creation order. References stay valid as
/// parameters are added.
class ParameterSet {
public:
    Tensor& add(std::string name, Tensor value) {
        for (const auto& [n, _] : items_)
            if (n == name) throw UsageError("duplicate parameter '" + name + "'");
        value.set_requires_grad(true);
        items_.emplace_back(std::move(name), std::move(value));
        return items_.back().second;
    }

    Tensor& at(std::string_view name) {
        for (auto& [n, t] : items_)
            if (n == name) return t;
        throw UsageError("no parameter named '" + std::string(name) + "'");
    }

    const Tensor& at(std::string_view name) const { return const_cast<ParameterSet*>(this)->at(name); }

    bool contains(std::string_view name) const {
        for (const auto& [n, _] : items_)
            if (n == name) return true;
        return false;
    }

    std::size_t size() const noexcept { return items_.size(); }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& [_, t] : items_) n += t.size();
        return n;
    }

    auto begin() { return items_.begin(); }
    auto end() { return items_.end(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    std::vector<Tensor*> pointers() {
        std::vector<Tensor*> out;
        for (auto& [_, t] : items_) out.push_back(&t);
        return out;
    }

    void zero_grad() {
        for (auto& [_, t] : items_) t.clear_grad();
    }

    std::vector<Tensor> snapshot() const {
        std::vector<Tensor> out;
        for (const auto& [_, t] : items_) out.push_back(t.detached());
        return out;
    }

    void restore(const std::vector<Tensor>& values) {
        if (values.size() != items_.size()) throw UsageError("snapshot size mismatch");
        std::size_t i = 0;
        for (auto& [_, t] : items_) {
            if (values[i].shape() != t.shape()) throw DimensionError("snapshot shape mismatch");
            std::copy(values[i].values().begin(), values[i].values().end(), t.values().begin());
            t.clear_grad();
            ++i;
        }
    }

    friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
        if (a.items_.size() != b.items_.size()) return false;
        for (std::size_t i = 0; i < a.items_.size(); ++i)
            if (a.items_[i].first != b.items_[i].first || !(a.items_[i].second == b.items_[i].second)) return false;
        return true;
    }

private:
    std::deque<std::pair<std::string, Tensor>> items_;
};

/// Glorot/Xavier uniform initialization for a [fan_in x fan_out] weight.
inline Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t({fan_in, fan_out});
    for (double& v : t.values()) v = rng.uniform(-a, a);
    return t;
}

} // namespace oncograph
