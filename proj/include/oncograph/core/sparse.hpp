#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed-sparse-row matrix.
///
/// Column indices are strictly increasing within each row. The structure
/// doubles as an edge list: entry k of row i is the directed edge i -> indices[k].
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                 std::vector<std::size_t> indices, std::vector<double> values)
        : rows_(rows), cols_(cols), offsets_(std::move(offsets)), indices_(std::move(indices)),
          values_(std::move(values)) {
        validate();
    }

    /// Builds from unordered triplets; duplicate coordinates are summed.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
        for (const auto& t : triplets) {
            if (t.row >= rows || t.col >= cols) {
                throw DimensionError("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                     ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
            }
        }
        std::sort(triplets.begin(), triplets.end(),
                  [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
        std::vector<std::size_t> offsets(rows + 1, 0);
        std::vector<std::size_t> indices;
        std::vector<double> values;
        indices.reserve(triplets.size());
        values.reserve(triplets.size());
        for (std::size_t k = 0; k < triplets.size(); ++k) {
            const auto& t = triplets[k];
            if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
                values.back() += t.value;
                continue;
            }
            indices.push_back(t.col);
            values.push_back(t.value);
            ++offsets[t.row + 1];
        }
        for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
        return SparseMatrix(rows, cols, std::move(offsets), std::move(indices), std::move(values));
    }

    static SparseMatrix identity(std::size_t n) {
        std::vector<std::size_t> offsets(n + 1), indices(n);
        for (std::size_t i = 0; i < n; ++i) {
            offsets[i + 1] = i + 1;
            indices[i] = i;
        }
        return SparseMatrix(n, n, std::move(offsets), std::move(indices), std::vector<double>(n, 1.0));
    }

    static SparseMatrix from_dense(const Tensor& dense) {
        std::vector<Triplet> trips;
        for (std::size_t i = 0; i < dense.rows(); ++i)
            for (std::size_t j = 0; j < dense.cols(); ++j)
                if (dense(i, j) != 0.0) trips.push_back({i, j, dense(i, j)});
        return from_triplets(dense.rows(), dense.cols(), std::move(trips));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return indices_.size(); }

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values_mut() noexcept { return values_; }

    std::size_t row_begin(std::size_t r) const noexcept { return offsets_[r]; }
    std::size_t row_end(std::size_t r) const noexcept { return offsets_[r + 1]; }

    /// Row index of every stored entry, in storage order.
    std::vector<std::size_t> row_of_entries() const {
        std::vector<std::size_t> out(nnz());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) out[k] = r;
        return out;
    }

    double at(std::size_t r, std::size_t c) const {
        const auto first = indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[r]);
        const auto last = indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]);
        const auto it = std::lower_bound(first, last, c);
        return (it != last && *it == c) ? values_[static_cast<std::size_t>(it - indices_.begin())] : 0.0;
    }

    Tensor densify() const {
        if (rows_ == 0 || cols_ == 0) throw DimensionError("cannot densify an empty matrix");
        Tensor out({rows_, cols_});
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) out(r, indices_[k]) = values_[k];
        return out;
    }

    void validate() const {
        if (offsets_.size() != rows_ + 1) throw DimensionError("CSR offsets length must be rows + 1");
        if (offsets_.front() != 0 || offsets_.back() != indices_.size() || indices_.size() != values_.size()) {
            throw DimensionError("CSR offsets do not match stored entries");
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            if (offsets_[r] > offsets_[r + 1]) throw DimensionError("CSR offsets must be nondecreasing");
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                if (indices_[k] >= cols_) throw DimensionError("CSR column index out of range");
                if (k > offsets_[r] && indices_[k] <= indices_[k - 1]) {
                    throw DimensionError("CSR column indices must be strictly increasing within a row");
                }
            }
        }
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> indices_;
    std::vector<double> values_;
};

/// Sparse-dense product S * D, no autodiff.
inline Tensor spmm(const SparseMatrix& s, const Tensor& d) {
    if (!d.is_matrix() || s.cols() != d.rows()) {
        throw DimensionError("spmm " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + " x " +
                             shape_string(d.shape()));
    }
    const std::size_t n = d.cols();
    Tensor out({s.rows(), n});
    const auto idx = s.indices();
    const auto val = s.values();
    for (std::size_t r = 0; r < s.rows(); ++r) {
        double* orow = &out(r, 0);
        for (std::size_t k = s.row_begin(r); k < s.row_end(r); ++k) {
            const double v = val[k];
            const double* drow = d.row(idx[k]).data();
            for (std::size_t j = 0; j < n; ++j) orow[j] += v * drow[j];
        }
    }
    return out;
}

} // namespace oncograph
