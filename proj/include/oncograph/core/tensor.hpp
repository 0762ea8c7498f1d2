#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oncograph/core/error.hpp"

namespace oncograph {

using Shape = std::vector<std::size_t>;

inline std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out << (i ? "x" : "") << shape[i];
    }
    out << ']';
    return out.str();
}

inline std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

/// Dense row-major array of doubles with an optional gradient buffer.
///
/// Every dimension is positive. A default-constructed tensor is the scalar 0
/// with shape [1]. Most learning code works on rank-2 tensors; rows()/cols()
/// treat a rank-1 tensor of length n as a 1 x n row.
class Tensor {
public:
    Tensor() : shape_{1}, values_(1, 0.0) {}

    explicit Tensor(Shape shape) : shape_(std::move(shape)) {
        check_shape();
        values_.assign(shape_size(shape_), 0.0);
    }

    Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
        check_shape();
        if (shape_size(shape_) != values_.size()) {
            throw DimensionError("tensor shape " + shape_string(shape_) + " does not match " +
                                 std::to_string(values_.size()) + " values");
        }
    }

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

    static Tensor full(Shape shape, double value) {
        Tensor t(std::move(shape));
        std::fill(t.values_.begin(), t.values_.end(), value);
        return t;
    }

    static Tensor scalar(double value) { return Tensor({1}, {value}); }

    /// Builds a rows x cols matrix from nested initializer lists.
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.begin()->size() : 0;
        std::vector<double> values;
        values.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c) throw DimensionError("ragged matrix literal");
            values.insert(values.end(), row.begin(), row.end());
        }
        return Tensor({r, c}, std::move(values));
    }

    static Tensor vector(std::initializer_list<double> values) {
        return Tensor({values.size()}, std::vector<double>(values));
    }

    static Tensor identity(std::size_t n) {
        Tensor t({n, n});
        for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
        return t;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    std::size_t rows() const noexcept { return shape_.size() == 1 ? 1 : shape_[0]; }
    std::size_t cols() const noexcept { return shape_.back(); }

    bool is_matrix() const noexcept { return shape_.size() <= 2; }
    bool is_scalar() const noexcept { return values_.size() == 1; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols(), cols()}; }
    std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols(), cols()}; }

    double item() const {
        if (values_.size() != 1) throw UsageError("item() on non-scalar tensor " + shape_string(shape_));
        return values_[0];
    }

    bool requires_grad() const noexcept { return requires_grad_; }
    Tensor& set_requires_grad(bool on) noexcept {
        requires_grad_ = on;
        return *this;
    }

    bool has_grad() const noexcept { return !grad_.empty(); }
    std::span<const double> grad() const noexcept { return grad_; }

    /// Gradient buffer, allocated (zero-filled) on first access.
    std::span<double> grad_mut() {
        if (grad_.empty()) grad_.assign(values_.size(), 0.0);
        return grad_;
    }

    void zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }
    void clear_grad() { grad_.clear(); }

    Tensor detached() const { return Tensor(shape_, values_); }

    Tensor reshaped(Shape shape) const { return Tensor(std::move(shape), values_); }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    void check_finite(std::string_view op) const {
        if (!all_finite()) throw NumericError(std::string(op) + " produced a non-finite value");
    }

    /// Value equality; gradient state is ignored.
    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.values_ == b.values_;
    }

private:
    void check_shape() const {
        if (shape_.empty()) throw DimensionError("tensor shape must have at least one dimension");
        for (std::size_t d : shape_) {
            if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_string(shape_));
        }
    }

    Shape shape_;
    std::vector<double> values_;
    std::vector<double> grad_;
    bool requires_grad_ = false;
};

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("max_abs_diff shape mismatch " + shape_string(a.shape()) + " vs " +
                             shape_string(b.shape()));
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Plain dense product, no autodiff.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (!a.is_matrix() || !b.is_matrix() || a.cols() != b.rows()) {
        throw DimensionError("matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        double* orow = &out(i, 0);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a(i, p);
            if (av == 0.0) continue;
            const double* brow = b.row(p).data();
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

inline Tensor transpose(const Tensor& a) {
    Tensor out({a.cols(), a.rows()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

} // namespace oncograph
