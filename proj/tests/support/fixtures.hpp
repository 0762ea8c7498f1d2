#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "oncograph/core/rng.hpp"
#include "oncograph/gnn/config.hpp"
#include "oncograph/graph/feature_graph.hpp"

namespace oncograph::testing {

/// Erdos-Renyi graph with uniform(-1, 1) features and labels i % classes.
inline FeatureGraph random_graph(std::size_t n, std::size_t features, double p_edge, std::uint64_t seed,
                                 std::size_t classes = 3) {
    Rng rng(seed);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p_edge) edges.emplace_back(i, j);
    Tensor x({n, features});
    for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    return FeatureGraph::from_edges(n, std::move(edges), std::move(x), std::move(labels));
}

/// The fixed 6-node, 4-feature graph of the gradient suite: a 4-node
/// cluster with a chord plus a separate edge.
inline FeatureGraph gradient_graph() {
    Rng rng(3);
    Tensor x({6, 4});
    for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
    return FeatureGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {4, 5}}, std::move(x),
                                    {0, 1, 2, 0, 1, 2});
}

/// Small smooth configuration for gradient and equivariance checks.
inline ModelConfig small_config(Operator op) {
    ModelConfig c = ModelConfig::defaults_for(op);
    c.hidden_dim = 4;
    c.heads = 2;
    c.activation = Activation::tanh;
    return c;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(p));
    return p;
}

} // namespace oncograph::testing
