#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/ops.hpp"
#include "oncograph/core/sparse.hpp"
#include "oncograph/core/tape.hpp"
#include "oncograph/gnn/config.hpp"
#include "oncograph/graph/operators.hpp"

// Single-layer building blocks for the eight operators. Each takes the node
// states h ([nodes x d]) and precomputed sparse graph operators; none of them
// owns parameters.

namespace oncograph {

inline Var activate(Var x, Activation a) {
    switch (a) {
    case Activation::relu: return relu(x);
    case Activation::elu: return elu(x);
    case Activation::tanh: return tanh(x);
    case Activation::sigmoid: return sigmoid(x);
    case Activation::identity: return x;
    }
    return x;
}

inline Var linear(Var x, Var weight, std::optional<Var> bias = std::nullopt) {
    Var y = matmul(x, weight);
    return bias ? add(y, *bias) : y;
}

/// Renormalized propagation: adj * h * W (+ b).
inline Var gcn_layer(const SparseMatrix& adjacency, Var h, Var weight, std::optional<Var> bias = std::nullopt) {
    Var y = spmm(adjacency, matmul(h, weight));
    return bias ? add(y, *bias) : y;
}

/// Chebyshev filter of order theta.size() over the scaled Laplacian.
inline Var cheb_layer(const SparseMatrix& scaled_laplacian, Var h, std::span<const Var> theta,
                      std::optional<Var> bias = std::nullopt) {
    Var y = chebyshev_apply(scaled_laplacian, h, theta);
    return bias ? add(y, *bias) : y;
}

/// W applied to the mean over {i} and its neighbors; mean_self from mean_aggregation(g, true).
inline Var sage_layer(const SparseMatrix& mean_self, Var h, Var weight, std::optional<Var> bias = std::nullopt) {
    return linear(spmm(mean_self, h), weight, bias);
}

/// (1 + eps) h_i + aggregate_j h_j; aggregation is the mean or sum neighbor operator.
inline Var gin_combine(const SparseMatrix& aggregation, Var h, std::optional<Var> epsilon = std::nullopt) {
    Var self = epsilon ? add(h, scale_by(h, *epsilon)) : h;
    return add(self, spmm(aggregation, h));
}

/// sum_{k=0..K} adj^k h W_k (+ b); weights holds K + 1 matrices.
inline Var tagcn_layer(const SparseMatrix& adjacency, Var h, std::span<const Var> weights,
                       std::optional<Var> bias = std::nullopt) {
    if (weights.empty()) throw ConfigError("TAGCN layer needs at least the zero-hop weight");
    Var hop = h;
    Var out = matmul(h, weights[0]);
    for (std::size_t k = 1; k < weights.size(); ++k) {
        hop = spmm(adjacency, hop);
        out = add(out, matmul(hop, weights[k]));
    }
    return bias ? add(out, *bias) : out;
}

struct GatHead {
    Var weight;   ///< [in x d]
    Var att_src;  ///< [d x 1], scores the receiving node i
    Var att_dst;  ///< [d x 1], scores the neighbor j
};

struct GatOutput {
    Var out;
    std::vector<Var> attention; ///< per head, one weight per support entry
};

/// Multi-head attention over the support pattern (neighbors plus self):
///   e_ij = LeakyReLU(a_src . W h_i + a_dst . W h_j),  alpha_i. = softmax_j e_ij,
///   head_i = sum_j alpha_ij W h_j.
/// Heads are concatenated when concat is set, averaged otherwise.
inline GatOutput gat_layer(const SparseMatrix& support, Var h, std::span<const GatHead> heads, bool concat,
                           double negative_slope = 0.2) {
    if (heads.empty()) throw ConfigError("GAT layer needs at least one head");
    GatOutput result;
    std::vector<Var> outs;
    for (const GatHead& head : heads) {
        Var wh = matmul(h, head.weight);
        Var scores = leaky_relu(edge_scores(support, matmul(wh, head.att_src), matmul(wh, head.att_dst)),
                                negative_slope);
        Var alpha = edge_softmax(support, scores);
        result.attention.push_back(alpha);
        outs.push_back(edge_aggregate(support, alpha, wh));
    }
    if (concat) {
        result.out = outs.size() == 1 ? outs[0] : concat_cols(outs);
    } else {
        Var acc = outs[0];
        for (std::size_t i = 1; i < outs.size(); ++i) acc = add(acc, outs[i]);
        result.out = outs.size() == 1 ? acc : scale(acc, 1.0 / static_cast<double>(outs.size()));
    }
    return result;
}

struct AgnnOutput {
    Var out;
    Var attention; ///< P_ij per neighbor entry
};

/// One attention-propagation step over neighbors (no self-loop):
///   P_i. = softmax_j (beta * cos(h_i, h_j)),  m_i = sum_j P_ij h_j.
/// Zero-norm rows have cosine 0. Isolated nodes receive a zero message.
inline AgnnOutput agnn_propagate(const SparseMatrix& neighbors, Var h, Var beta) {
    Var unit = row_normalize(h);
    Var scores = scale_by(edge_dot(neighbors, unit, unit), beta);
    Var p = edge_softmax(neighbors, scores);
    return {edge_aggregate(neighbors, p, h), p};
}

/// adj^K x by K sparse products.
inline Tensor sgc_propagate(const SparseMatrix& adjacency, const Tensor& x, std::size_t k) {
    Tensor out = x.detached();
    for (std::size_t i = 0; i < k; ++i) out = spmm(adjacency, out);
    return out;
}

/// Graph-level embedding: concatenation over layers of the node-mean of each state.
inline Tensor gin_readout(std::span<const Tensor> states) {
    if (states.empty()) throw UsageError("readout needs at least one layer state");
    std::size_t width = 0;
    for (const auto& s : states) width += s.cols();
    Tensor out({1, width});
    std::size_t offset = 0;
    for (const auto& s : states) {
        for (std::size_t j = 0; j < s.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < s.rows(); ++i) acc += s(i, j);
            out[offset + j] = acc / static_cast<double>(s.rows());
        }
        offset += s.cols();
    }
    return out;
}

} // namespace oncograph
