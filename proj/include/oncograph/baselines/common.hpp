#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

// Shared input checks and helpers for the graph-free baselines. Inputs are
// patient multi-hot matrices [m x F] with entries in {0, 1} and class
// indices in [0, num_classes).

namespace oncograph {

inline void check_binary_matrix(const Tensor& x) {
    if (!x.is_matrix()) throw DimensionError("baseline input must be a matrix");
    for (double v : x.values())
        if (v != 0.0 && v != 1.0) throw DataError("baseline input must be binary (multi-hot)");
}

inline void check_labels(std::span<const int> y, std::size_t rows, std::size_t num_classes) {
    if (rows == 0) throw UsageError("cannot fit on an empty matrix");
    if (y.size() != rows) throw DimensionError("label count differs from the number of rows");
    for (int c : y)
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw DataError("label outside the class range");
}

/// Index of the largest entry; ties go to the lowest index.
inline int argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] > v[best]) best = j;
    return static_cast<int>(best);
}

/// Row-wise argmax of a probability matrix.
inline std::vector<int> argmax_rows(const Tensor& p) {
    std::vector<int> out;
    out.reserve(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) out.push_back(argmax_lowest(p.row(i)));
    return out;
}

/// Rows of x selected by index, in the given order.
inline Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
    if (rows.empty()) throw UsageError("gather_rows needs at least one row");
    Tensor out({rows.size(), x.cols()});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= x.rows()) throw DimensionError("row index out of range");
        const auto src = x.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

} // namespace oncograph
