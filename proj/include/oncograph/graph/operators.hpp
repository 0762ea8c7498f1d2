#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/core/sparse.hpp"
#include "oncograph/core/tape.hpp"
#include "oncograph/graph/feature_graph.hpp"

namespace oncograph {

enum class AdjacencyNorm {
    sym_selfloop, ///< D^-1/2 (A + I) D^-1/2 with D the degree of A + I
    random_walk,  ///< D^-1 (A + I)
    none,         ///< A + I
};

struct NormalizedAdjacency {
    SparseMatrix matrix;
    AdjacencyNorm kind = AdjacencyNorm::sym_selfloop;
};

inline NormalizedAdjacency normalize_adjacency(const FeatureGraph& g,
                                               AdjacencyNorm kind = AdjacencyNorm::sym_selfloop) {
    const std::size_t n = g.num_nodes();
    std::vector<double> deg(n);
    for (std::size_t i = 0; i < n; ++i) deg[i] = static_cast<double>(g.degree(i)) + 1.0;
    std::vector<Triplet> trips;
    trips.reserve(g.adjacency().nnz() + n);
    auto weight = [&](std::size_t i, std::size_t j) {
        switch (kind) {
        case AdjacencyNorm::sym_selfloop: return 1.0 / std::sqrt(deg[i] * deg[j]);
        case AdjacencyNorm::random_walk: return 1.0 / deg[i];
        case AdjacencyNorm::none: return 1.0;
        }
        return 1.0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        trips.push_back({i, i, weight(i, i)});
        for (std::size_t j : g.neighbors(i)) trips.push_back({i, j, weight(i, j)});
    }
    return {SparseMatrix::from_triplets(n, n, std::move(trips)), kind};
}

/// Row i averages the neighbors of i (and i itself when include_self).
/// Rows of isolated nodes are empty without include_self.
inline SparseMatrix mean_aggregation(const FeatureGraph& g, bool include_self) {
    const std::size_t n = g.num_nodes();
    std::vector<Triplet> trips;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(g.degree(i) + (include_self ? 1 : 0));
        if (d == 0.0) continue;
        if (include_self) trips.push_back({i, i, 1.0 / d});
        for (std::size_t j : g.neighbors(i)) trips.push_back({i, j, 1.0 / d});
    }
    return SparseMatrix::from_triplets(n, n, std::move(trips));
}

/// Adjacency with unit self-loops; used as the attention support N(i) U {i}.
inline SparseMatrix self_loop_pattern(const FeatureGraph& g) {
    return normalize_adjacency(g, AdjacencyNorm::none).matrix;
}

/// Normalized Laplacian L = I - D^-1/2 A D^-1/2. Isolated nodes get a zero row,
/// so a graph without edges has L = 0.
inline SparseMatrix normalized_laplacian(const FeatureGraph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<Triplet> trips;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(g.degree(i));
        if (di == 0.0) continue;
        trips.push_back({i, i, 1.0});
        for (std::size_t j : g.neighbors(i)) {
            trips.push_back({i, j, -1.0 / std::sqrt(di * static_cast<double>(g.degree(j)))});
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(trips));
}

struct PowerIterationResult {
    double eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Dominant eigenvalue of a symmetric positive semidefinite matrix, iterating
/// until successive Rayleigh quotients differ by at most tolerance.
inline PowerIterationResult power_iteration(const SparseMatrix& m, double tolerance = 1e-9,
                                            std::size_t max_iterations = 10000) {
    const std::size_t n = m.rows();
    Rng rng(0x5eed);
    Tensor v({n, 1});
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 + rng.uniform();
    auto normalize = [](Tensor& t) {
        double s = 0.0;
        for (double x : t.values()) s += x * x;
        s = std::sqrt(s);
        if (s > 0.0)
            for (double& x : t.values()) x /= s;
        return s;
    };
    normalize(v);
    PowerIterationResult result;
    double previous = 0.0;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        Tensor w = spmm(m, v);
        double rq = 0.0;
        for (std::size_t i = 0; i < n; ++i) rq += v[i] * w[i];
        result.eigenvalue = rq;
        result.iterations = it;
        if (normalize(w) == 0.0) {
            result.eigenvalue = 0.0;
            result.converged = true;
            return result;
        }
        if (it > 1 && std::abs(rq - previous) <= tolerance) {
            result.converged = true;
            return result;
        }
        previous = rq;
        v = std::move(w);
    }
    return result;
}

enum class LambdaMaxMode { exact, fixed };

struct ScaledLaplacian {
    SparseMatrix matrix; ///< (2 / lambda_max) L - I
    double lambda_max = 2.0;
    /// Set when exact mode did not converge and lambda_max fell back to 2.
    bool fallback = false;
};

inline ScaledLaplacian scaled_laplacian(const FeatureGraph& g, LambdaMaxMode mode = LambdaMaxMode::fixed,
                                        double tolerance = 1e-9, std::size_t max_iterations = 10000) {
    const SparseMatrix lap = normalized_laplacian(g);
    ScaledLaplacian out;
    if (mode == LambdaMaxMode::exact && lap.nnz() > 0) {
        const auto pi = power_iteration(lap, tolerance, max_iterations);
        if (pi.converged && pi.eigenvalue > 0.0) {
            out.lambda_max = pi.eigenvalue;
        } else {
            out.fallback = true;
        }
    }
    const std::size_t n = g.num_nodes();
    std::vector<Triplet> trips;
    trips.reserve(lap.nnz() + n);
    const double c = 2.0 / out.lambda_max;
    for (std::size_t i = 0; i < n; ++i) {
        trips.push_back({i, i, -1.0});
        for (std::size_t k = lap.row_begin(i); k < lap.row_end(i); ++k) {
            trips.push_back({i, lap.indices()[k], c * lap.values()[k]});
        }
    }
    out.matrix = SparseMatrix::from_triplets(n, n, std::move(trips));
    return out;
}

/// sum_{k<K} T_k(L) x theta_k via T_0 = x, T_1 = L x, T_k = 2 L T_{k-1} - T_{k-2}.
/// Each theta_k is either an [in x out] matrix or a scalar filter tap.
inline Var chebyshev_apply(const SparseMatrix& laplacian, Var x, std::span<const Var> theta) {
    if (theta.empty()) throw ConfigError("Chebyshev order K must be at least 1");
    auto term = [](Var tx, Var th) { return th.value().is_scalar() ? scale_by(tx, th) : matmul(tx, th); };
    Var t_prev = x;
    Var out = term(x, theta[0]);
    if (theta.size() == 1) return out;
    Var t_cur = spmm(laplacian, x);
    out = add(out, term(t_cur, theta[1]));
    for (std::size_t k = 2; k < theta.size(); ++k) {
        Var t_next = sub(scale(spmm(laplacian, t_cur), 2.0), t_prev);
        out = add(out, term(t_next, theta[k]));
        t_prev = t_cur;
        t_cur = t_next;
    }
    return out;
}

/// Tensor-level convenience wrapper around the differentiable form.
inline Tensor chebyshev_apply(const ScaledLaplacian& l, const Tensor& x, std::span<const Tensor> theta, int order) {
    if (order <= 0) throw ConfigError("Chebyshev order K must be at least 1");
    if (theta.size() != static_cast<std::size_t>(order)) throw ConfigError("expected K filter coefficients");
    Tape tape;
    Var xv = tape.constant(x);
    std::vector<Var> th;
    for (const auto& t : theta) th.push_back(tape.constant(t));
    return chebyshev_apply(l.matrix, xv, th).value().detached();
}

} // namespace oncograph
