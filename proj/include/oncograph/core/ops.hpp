#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/core/sparse.hpp"
#include "oncograph/core/tape.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

namespace detail {

inline void same_tape(Var a, Var b) {
    if (a.tape == nullptr || a.tape != b.tape) throw UsageError("operands recorded on different tapes");
}

inline void require_matrix(const Tensor& t, std::string_view op) {
    if (!t.is_matrix()) throw DimensionError(std::string(op) + " expects a matrix, got " + shape_string(t.shape()));
}

inline void require_same_shape(const Tensor& a, const Tensor& b, std::string_view op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + " shape mismatch " + shape_string(a.shape()) + " vs " +
                             shape_string(b.shape()));
    }
}

inline void require_column(const Tensor& t, std::size_t rows, std::string_view op) {
    if (t.size() != rows) {
        throw DimensionError(std::string(op) + " expects " + std::to_string(rows) + " entries, got " +
                             shape_string(t.shape()));
    }
}

template <typename Fwd, typename Deriv>
Var unary(Var a, std::string_view op, Fwd fwd, Deriv deriv) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
    return a.tape->record(
        std::move(out), {a},
        [a, deriv](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            if (ga.empty()) return;
            const Tensor& xin = t.value(a);
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * deriv(xin[i]);
        },
        op);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra

inline Var matmul(Var a, Var b) {
    detail::same_tape(a, b);
    Tensor out = matmul(a.value(), b.value());
    return a.tape->record(
        std::move(out), {a, b},
        [a, b](Tape& t, std::span<const double> g) {
            const Tensor& av = t.value(a);
            const Tensor& bv = t.value(b);
            const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
            if (auto ga = t.grad_sink(a); !ga.empty()) {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bv(p, j);
                        ga[i * k + p] += s;
                    }
            }
            if (auto gb = t.grad_sink(b); !gb.empty()) {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        const double av_ip = av(i, p);
                        if (av_ip == 0.0) continue;
                        for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av_ip * g[i * n + j];
                    }
            }
        },
        "matmul");
}

/// S * d for a constant sparse S. S must outlive backward().
inline Var spmm(const SparseMatrix& s, Var d) {
    Tensor out = spmm(s, d.value());
    const SparseMatrix* sp = &s;
    return d.tape->record(
        std::move(out), {d},
        [sp, d](Tape& t, std::span<const double> g) {
            auto gd = t.grad_sink(d);
            if (gd.empty()) return;
            const std::size_t n = t.value(d).cols();
            const auto idx = sp->indices();
            const auto val = sp->values();
            for (std::size_t r = 0; r < sp->rows(); ++r)
                for (std::size_t k = sp->row_begin(r); k < sp->row_end(r); ++k) {
                    double* dst = gd.data() + idx[k] * n;
                    const double* src = g.data() + r * n;
                    for (std::size_t j = 0; j < n; ++j) dst[j] += val[k] * src[j];
                }
        },
        "spmm");
}

// ---------------------------------------------------------------------------
// Elementwise

/// a + b where b has a's shape, or b is a single row broadcast over a's rows.
inline Var add(Var a, Var b) {
    detail::same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    const bool exact = av.shape() == bv.shape();
    const bool row_broadcast = !exact && av.is_matrix() && bv.size() == av.cols() &&
                               (bv.rank() == 1 || bv.rows() == 1);
    if (!exact && !row_broadcast) {
        throw DimensionError("add shape mismatch " + shape_string(av.shape()) + " vs " + shape_string(bv.shape()));
    }
    Tensor out = av.detached();
    const std::size_t n = bv.size();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[exact ? i : i % n];
    return a.tape->record(
        std::move(out), {a, b},
        [a, b, exact, n](Tape& t, std::span<const double> g) {
            if (auto ga = t.grad_sink(a); !ga.empty())
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
            if (auto gb = t.grad_sink(b); !gb.empty())
                for (std::size_t i = 0; i < g.size(); ++i) gb[exact ? i : i % n] += g[i];
        },
        "add");
}

inline Var sub(Var a, Var b) {
    detail::same_tape(a, b);
    detail::require_same_shape(a.value(), b.value(), "sub");
    Tensor out = a.value().detached();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return a.tape->record(
        std::move(out), {a, b},
        [a, b](Tape& t, std::span<const double> g) {
            if (auto ga = t.grad_sink(a); !ga.empty())
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
            if (auto gb = t.grad_sink(b); !gb.empty())
                for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
        },
        "sub");
}

/// Hadamard product.
inline Var mul(Var a, Var b) {
    detail::same_tape(a, b);
    detail::require_same_shape(a.value(), b.value(), "mul");
    Tensor out = a.value().detached();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return a.tape->record(
        std::move(out), {a, b},
        [a, b](Tape& t, std::span<const double> g) {
            const Tensor& av = t.value(a);
            const Tensor& bv2 = t.value(b);
            if (auto ga = t.grad_sink(a); !ga.empty())
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * bv2[i];
            if (auto gb = t.grad_sink(b); !gb.empty())
                for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * av[i];
        },
        "mul");
}

inline Var scale(Var a, double c) {
    return detail::unary(
        a, "scale", [c](double x) { return c * x; }, [c](double) { return c; });
}

/// s * a for a learnable scalar s (shape [1] or [1x1]).
inline Var scale_by(Var a, Var s) {
    detail::same_tape(a, s);
    if (!s.value().is_scalar()) throw DimensionError("scale_by expects a scalar factor");
    const double c = s.value()[0];
    Tensor out = a.value().detached();
    for (double& v : out.values()) v *= c;
    return a.tape->record(
        std::move(out), {a, s},
        [a, s](Tape& t, std::span<const double> g) {
            const Tensor& av = t.value(a);
            const double cv = t.value(s)[0];
            if (auto ga = t.grad_sink(a); !ga.empty())
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += cv * g[i];
            if (auto gs = t.grad_sink(s); !gs.empty()) {
                double acc = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
                gs[0] += acc;
            }
        },
        "scale_by");
}

inline Var relu(Var a) {
    return detail::unary(
        a, "relu", [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

inline Var leaky_relu(Var a, double slope = 0.2) {
    return detail::unary(
        a, "leaky_relu", [slope](double x) { return x > 0.0 ? x : slope * x; },
        [slope](double x) { return x > 0.0 ? 1.0 : slope; });
}

inline Var sigmoid(Var a) {
    auto f = [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    };
    return detail::unary(a, "sigmoid", f, [f](double x) {
        const double y = f(x);
        return y * (1.0 - y);
    });
}

inline Var tanh(Var a) {
    return detail::unary(
        a, "tanh", [](double x) { return std::tanh(x); },
        [](double x) {
            const double y = std::tanh(x);
            return 1.0 - y * y;
        });
}

inline Var elu(Var a, double alpha = 1.0) {
    return detail::unary(
        a, "elu", [alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); },
        [alpha](double x) { return x > 0.0 ? 1.0 : alpha * std::exp(x); });
}

/// Inverted dropout. The keep mask is a pure function of (seed, element index);
/// when training is false the input passes through unchanged.
inline Var dropout(Var a, double p, std::uint64_t seed, bool training) {
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
    if (!training || p == 0.0) return a;
    Rng rng(seed);
    const Tensor& x = a.value();
    std::vector<double> mask(x.size());
    for (double& m : mask) m = rng.bernoulli(p) ? 0.0 : 1.0 / (1.0 - p);
    Tensor out = x.detached();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return a.tape->record(
        std::move(out), {a},
        [a, mask = std::move(mask)](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * mask[i];
        },
        "dropout");
}

// ---------------------------------------------------------------------------
// Reductions and reshaping

inline Var sum(Var a) {
    const Tensor& x = a.value();
    double s = 0.0;
    for (double v : x.values()) s += v;
    return a.tape->record(
        Tensor::scalar(s), {a},
        [a](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            for (double& v : ga) v += g[0];
        },
        "sum");
}

/// Column means over rows: [m x n] -> [1 x n].
inline Var mean_rows(Var a) {
    const Tensor& x = a.value();
    detail::require_matrix(x, "mean_rows");
    const std::size_t m = x.rows(), n = x.cols();
    Tensor out({1, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j] += x(i, j);
    for (std::size_t j = 0; j < n; ++j) out[j] /= static_cast<double>(m);
    return a.tape->record(
        std::move(out), {a},
        [a, m, n](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            if (ga.empty()) return;
            const double inv = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j] * inv;
        },
        "mean_rows");
}

/// Horizontal concatenation of matrices with equal row counts.
inline Var concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw UsageError("concat_cols needs at least one operand");
    const std::size_t m = parts[0].rows();
    std::size_t total = 0;
    std::vector<std::size_t> widths;
    for (const Var& p : parts) {
        detail::same_tape(parts[0], p);
        if (p.rows() != m) throw DimensionError("concat_cols row count mismatch");
        widths.push_back(p.cols());
        total += p.cols();
    }
    Tensor out({m, total});
    std::size_t offset = 0;
    for (const Var& p : parts) {
        const Tensor& v = p.value();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < v.cols(); ++j) out(i, offset + j) = v(i, j);
        offset += v.cols();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return parts[0].tape->record(
        std::move(out), std::span<const Var>(inputs),
        [inputs, widths, m, total](Tape& t, std::span<const double> g) {
            std::size_t off = 0;
            for (std::size_t p = 0; p < inputs.size(); ++p) {
                auto gp = t.grad_sink(inputs[p]);
                if (!gp.empty())
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < widths[p]; ++j) gp[i * widths[p] + j] += g[i * total + off + j];
                off += widths[p];
            }
        },
        "concat_cols");
}

/// Scales each row to unit Euclidean norm; all-zero rows stay zero.
inline Var row_normalize(Var a) {
    const Tensor& x = a.value();
    detail::require_matrix(x, "row_normalize");
    const std::size_t m = x.rows(), n = x.cols();
    std::vector<double> norms(m, 0.0);
    Tensor out(x.shape());
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += x(i, j) * x(i, j);
        norms[i] = std::sqrt(s);
        if (norms[i] > 0.0)
            for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i, j) / norms[i];
    }
    Tensor kept = out.detached();
    return a.tape->record(
        std::move(out), {a},
        [a, y = std::move(kept), norms = std::move(norms), m, n](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            if (ga.empty()) return;
            for (std::size_t i = 0; i < m; ++i) {
                if (norms[i] == 0.0) continue;
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) dot += y(i, j) * g[i * n + j];
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += (g[i * n + j] - y(i, j) * dot) / norms[i];
            }
        },
        "row_normalize");
}

// ---------------------------------------------------------------------------
// Softmax family

/// Row-wise softmax with max subtraction.
inline Tensor softmax_rows(const Tensor& x) {
    detail::require_matrix(x, "softmax_rows");
    if (!x.all_finite()) throw NumericError("softmax_rows input is not finite");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        auto orow = out.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            orow[j] = std::exp(row[j] - mx);
            z += orow[j];
        }
        for (double& v : orow) v /= z;
    }
    return out;
}

inline Var softmax_rows(Var a) {
    Tensor out = softmax_rows(a.value());
    Tensor kept = out.detached();
    const std::size_t m = out.rows(), n = out.cols();
    return a.tape->record(
        std::move(out), {a},
        [a, y = std::move(kept), m, n](Tape& t, std::span<const double> g) {
            auto ga = t.grad_sink(a);
            if (ga.empty()) return;
            for (std::size_t i = 0; i < m; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y(i, j);
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += y(i, j) * (g[i * n + j] - dot);
            }
        },
        "softmax_rows");
}

/// Mean negative log-likelihood of labels[r] under softmax(logits[rows[r]]).
inline Var cross_entropy(Var logits, std::span<const std::size_t> rows, std::span<const int> labels) {
    const Tensor& z = logits.value();
    detail::require_matrix(z, "cross_entropy");
    if (rows.size() != labels.size()) throw DimensionError("cross_entropy rows/labels length mismatch");
    if (rows.empty()) throw UsageError("cross_entropy over an empty row set");
    const std::size_t c = z.cols();
    const std::size_t m = rows.size();
    Tensor probs({m, c});
    double loss = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (rows[r] >= z.rows()) throw DimensionError("cross_entropy row index out of range");
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= c) {
            throw DataError("label " + std::to_string(labels[r]) + " outside [0, " + std::to_string(c) + ")");
        }
        const auto row = z.row(rows[r]);
        const double mx = *std::max_element(row.begin(), row.end());
        double zsum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            probs(r, j) = std::exp(row[j] - mx);
            zsum += probs(r, j);
        }
        for (std::size_t j = 0; j < c; ++j) probs(r, j) /= zsum;
        loss += -(row[static_cast<std::size_t>(labels[r])] - mx - std::log(zsum));
    }
    loss /= static_cast<double>(m);
    std::vector<std::size_t> row_copy(rows.begin(), rows.end());
    std::vector<int> label_copy(labels.begin(), labels.end());
    return logits.tape->record(
        Tensor::scalar(loss), {logits},
        [logits, probs = std::move(probs), row_copy = std::move(row_copy), label_copy = std::move(label_copy), c,
         m](Tape& t, std::span<const double> g) {
            auto gz = t.grad_sink(logits);
            if (gz.empty()) return;
            const double w = g[0] / static_cast<double>(m);
            for (std::size_t r = 0; r < m; ++r) {
                double* dst = gz.data() + row_copy[r] * c;
                for (std::size_t j = 0; j < c; ++j) dst[j] += w * probs(r, j);
                dst[label_copy[r]] -= w;
            }
        },
        "cross_entropy");
}

inline Var cross_entropy(Var logits, std::span<const int> labels) {
    std::vector<std::size_t> rows(labels.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return cross_entropy(logits, rows, labels);
}

// ---------------------------------------------------------------------------
// Edge-level ops over a sparsity pattern. Entry k of the pattern is the edge
// (row_k -> col_k); edge tensors have shape [nnz x 1].

/// e_k = src[row_k] + dst[col_k] for column vectors src and dst.
inline Var edge_scores(const SparseMatrix& pattern, Var src, Var dst) {
    detail::same_tape(src, dst);
    detail::require_column(src.value(), pattern.rows(), "edge_scores");
    detail::require_column(dst.value(), pattern.cols(), "edge_scores");
    const std::vector<std::size_t> rows = pattern.row_of_entries();
    const auto cols = pattern.indices();
    Tensor out({std::max<std::size_t>(pattern.nnz(), 1), 1});
    for (std::size_t k = 0; k < pattern.nnz(); ++k) out[k] = src.value()[rows[k]] + dst.value()[cols[k]];
    const SparseMatrix* p = &pattern;
    return src.tape->record(
        std::move(out), {src, dst},
        [p, src, dst, rows](Tape& t, std::span<const double> g) {
            const auto cidx = p->indices();
            if (auto gs = t.grad_sink(src); !gs.empty())
                for (std::size_t k = 0; k < p->nnz(); ++k) gs[rows[k]] += g[k];
            if (auto gd = t.grad_sink(dst); !gd.empty())
                for (std::size_t k = 0; k < p->nnz(); ++k) gd[cidx[k]] += g[k];
        },
        "edge_scores");
}

/// e_k = <a[row_k], b[col_k]>.
inline Var edge_dot(const SparseMatrix& pattern, Var a, Var b) {
    detail::same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.rows() != pattern.rows() || bv.rows() != pattern.cols() || av.cols() != bv.cols()) {
        throw DimensionError("edge_dot operand shapes do not match the pattern");
    }
    const std::size_t d = av.cols();
    const std::vector<std::size_t> rows = pattern.row_of_entries();
    const auto cols = pattern.indices();
    Tensor out({std::max<std::size_t>(pattern.nnz(), 1), 1});
    for (std::size_t k = 0; k < pattern.nnz(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += av(rows[k], j) * bv(cols[k], j);
        out[k] = s;
    }
    const SparseMatrix* p = &pattern;
    return a.tape->record(
        std::move(out), {a, b},
        [p, a, b, rows, d](Tape& t, std::span<const double> g) {
            const auto cidx = p->indices();
            const Tensor& av2 = t.value(a);
            const Tensor& bv2 = t.value(b);
            auto ga = t.grad_sink(a);
            auto gb = t.grad_sink(b);
            for (std::size_t k = 0; k < p->nnz(); ++k) {
                if (!ga.empty())
                    for (std::size_t j = 0; j < d; ++j) ga[rows[k] * d + j] += g[k] * bv2(cidx[k], j);
                if (!gb.empty())
                    for (std::size_t j = 0; j < d; ++j) gb[cidx[k] * d + j] += g[k] * av2(rows[k], j);
            }
        },
        "edge_dot");
}

/// Softmax of edge scores within each row's segment. Rows without entries contribute nothing.
inline Var edge_softmax(const SparseMatrix& pattern, Var scores) {
    detail::require_column(scores.value(), std::max<std::size_t>(pattern.nnz(), 1), "edge_softmax");
    const Tensor& s = scores.value();
    Tensor out(s.shape());
    for (std::size_t r = 0; r < pattern.rows(); ++r) {
        const std::size_t b = pattern.row_begin(r), e = pattern.row_end(r);
        if (b == e) continue;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = b; k < e; ++k) mx = std::max(mx, s[k]);
        double z = 0.0;
        for (std::size_t k = b; k < e; ++k) {
            out[k] = std::exp(s[k] - mx);
            z += out[k];
        }
        for (std::size_t k = b; k < e; ++k) out[k] /= z;
    }
    Tensor kept = out.detached();
    const SparseMatrix* p = &pattern;
    return scores.tape->record(
        std::move(out), {scores},
        [p, scores, y = std::move(kept)](Tape& t, std::span<const double> g) {
            auto gs = t.grad_sink(scores);
            if (gs.empty()) return;
            for (std::size_t r = 0; r < p->rows(); ++r) {
                const std::size_t b = p->row_begin(r), e = p->row_end(r);
                double dot = 0.0;
                for (std::size_t k = b; k < e; ++k) dot += g[k] * y[k];
                for (std::size_t k = b; k < e; ++k) gs[k] += y[k] * (g[k] - dot);
            }
        },
        "edge_softmax");
}

/// out[i] = sum over entries k of row i of weights[k] * h[col_k].
inline Var edge_aggregate(const SparseMatrix& pattern, Var weights, Var h) {
    detail::same_tape(weights, h);
    detail::require_column(weights.value(), std::max<std::size_t>(pattern.nnz(), 1), "edge_aggregate");
    const Tensor& hv = h.value();
    if (hv.rows() != pattern.cols()) throw DimensionError("edge_aggregate feature rows do not match the pattern");
    const std::size_t d = hv.cols();
    const auto cols = pattern.indices();
    const Tensor& w = weights.value();
    Tensor out({pattern.rows(), d});
    for (std::size_t r = 0; r < pattern.rows(); ++r)
        for (std::size_t k = pattern.row_begin(r); k < pattern.row_end(r); ++k)
            for (std::size_t j = 0; j < d; ++j) out(r, j) += w[k] * hv(cols[k], j);
    const SparseMatrix* p = &pattern;
    return h.tape->record(
        std::move(out), {weights, h},
        [p, weights, h, d](Tape& t, std::span<const double> g) {
            const auto cidx = p->indices();
            const Tensor& wv = t.value(weights);
            const Tensor& hv2 = t.value(h);
            auto gw = t.grad_sink(weights);
            auto gh = t.grad_sink(h);
            for (std::size_t r = 0; r < p->rows(); ++r)
                for (std::size_t k = p->row_begin(r); k < p->row_end(r); ++k) {
                    const double* grow = g.data() + r * d;
                    if (!gw.empty()) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < d; ++j) s += grow[j] * hv2(cidx[k], j);
                        gw[k] += s;
                    }
                    if (!gh.empty())
                        for (std::size_t j = 0; j < d; ++j) gh[cidx[k] * d + j] += wv[k] * grow[j];
                }
        },
        "edge_aggregate");
}

} // namespace oncograph
