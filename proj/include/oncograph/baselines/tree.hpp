#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "oncograph/baselines/common.hpp"
#include "oncograph/core/checkpoint.hpp"
#include "oncograph/core/rng.hpp"

namespace oncograph {

struct TreeOptions {
    std::optional<std::size_t> max_depth; ///< unlimited when empty
    /// Features drawn per split; 0 or >= F means every feature, in index order.
    std::size_t max_features = 0;
    std::uint64_t seed = 0; ///< drives per-split feature sampling
};

/// Flat-array node. Internal nodes route x[feature] == 0 to left, 1 to right.
struct TreeNode {
    int feature = -1; ///< -1 marks a leaf
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<double> counts; ///< class counts of the training samples reaching this node
    double value = 0.0;         ///< regression output (regression trees only)

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

inline double gini(std::span<const double> counts, double total) {
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += (c / total) * (c / total);
    return 1.0 - s;
}

/// A later feature must beat the current best split by more than this to replace it.
inline constexpr double kSplitTolerance = 1e-12;

namespace detail {

inline std::vector<std::size_t> split_candidates(std::size_t num_features, std::size_t max_features, Rng& rng) {
    std::vector<std::size_t> f(num_features);
    std::iota(f.begin(), f.end(), std::size_t{0});
    if (max_features == 0 || max_features >= num_features) return f;
    for (std::size_t i = 0; i < max_features; ++i) std::swap(f[i], f[i + rng.below(num_features - i)]);
    f.resize(max_features);
    std::sort(f.begin(), f.end());
    return f;
}

inline nlohmann::ordered_json nodes_to_json(const std::vector<TreeNode>& nodes) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) {
        nlohmann::ordered_json j;
        j["feature"] = n.feature;
        j["left"] = n.left;
        j["right"] = n.right;
        j["counts"] = n.counts;
        j["value"] = n.value;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<TreeNode> nodes_from_json(const nlohmann::ordered_json& arr) {
    std::vector<TreeNode> nodes;
    for (const auto& j : arr) {
        TreeNode n;
        n.feature = j.at("feature").get<int>();
        n.left = j.at("left").get<std::size_t>();
        n.right = j.at("right").get<std::size_t>();
        n.counts = j.at("counts").get<std::vector<double>>();
        n.value = j.at("value").get<double>();
        nodes.push_back(std::move(n));
    }
    for (const auto& n : nodes)
        if (!n.is_leaf() && (n.left >= nodes.size() || n.right >= nodes.size()))
            throw DataError("tree checkpoint has a dangling child index");
    return nodes;
}

} // namespace detail

/// Gini-impurity classification tree on binary features.
class DecisionTree {
public:
    DecisionTree() = default;

    /// Greedy fit; ties between equally good splits go to the lowest feature index.
    static DecisionTree fit(const Tensor& x, std::span<const int> y, std::size_t num_classes = 7,
                            const TreeOptions& options = {}) {
        check_binary_matrix(x);
        check_labels(y, x.rows(), num_classes);
        std::vector<std::size_t> rows(x.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        return fit_rows(x, y, rows, num_classes, options);
    }

    /// Fit on a multiset of row indices (bootstrap samples repeat rows).
    static DecisionTree fit_rows(const Tensor& x, std::span<const int> y, std::vector<std::size_t> rows,
                                 std::size_t num_classes, const TreeOptions& options) {
        if (rows.empty()) throw UsageError("cannot fit a tree on zero samples");
        DecisionTree t;
        t.num_classes_ = num_classes;
        t.num_features_ = x.cols();
        Rng rng(mix_seed(options.seed, 0x7ee));
        t.grow(x, y, std::move(rows), 0, options, rng);
        return t;
    }

    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t num_features() const noexcept { return num_features_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const TreeNode& root() const { return nodes_.at(0); }

    std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }

    const TreeNode& leaf_for(std::span<const double> row) const {
        if (row.size() != num_features_) throw DimensionError("row width differs from the training width");
        std::size_t i = 0;
        while (!nodes_[i].is_leaf()) i = row[static_cast<std::size_t>(nodes_[i].feature)] != 0.0 ? nodes_[i].right : nodes_[i].left;
        return nodes_[i];
    }

    /// Class frequencies of the leaf reached by each row.
    Tensor predict_proba(const Tensor& x) const {
        Tensor out({x.rows(), num_classes_});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto& counts = leaf_for(x.row(i)).counts;
            const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
            for (std::size_t c = 0; c < num_classes_; ++c) out(i, c) = counts[c] / total;
        }
        return out;
    }

    std::vector<int> predict(const Tensor& x) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(argmax_lowest(leaf_for(x.row(i)).counts));
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["num_classes"] = num_classes_;
        j["num_features"] = num_features_;
        j["nodes"] = detail::nodes_to_json(nodes_);
        return j;
    }

    static DecisionTree from_json(const nlohmann::ordered_json& j) {
        DecisionTree t;
        t.num_classes_ = j.at("num_classes").get<std::size_t>();
        t.num_features_ = j.at("num_features").get<std::size_t>();
        t.nodes_ = detail::nodes_from_json(j.at("nodes"));
        if (t.nodes_.empty()) throw DataError("tree checkpoint has no nodes");
        return t;
    }

    Checkpoint to_checkpoint(std::uint64_t vocab_hash = 0) const {
        Checkpoint c;
        c.kind = "decision_tree";
        c.vocab_hash = vocab_hash;
        c.payload = to_json();
        return c;
    }

    static DecisionTree from_checkpoint(const Checkpoint& c) {
        if (c.kind != "decision_tree") throw DataError("checkpoint kind '" + c.kind + "' is not a decision tree");
        return from_json(c.payload);
    }

    bool operator==(const DecisionTree&) const = default;

private:
    std::size_t depth_from(std::size_t i) const {
        const TreeNode& n = nodes_[i];
        return n.is_leaf() ? 0 : 1 + std::max(depth_from(n.left), depth_from(n.right));
    }

    std::size_t grow(const Tensor& x, std::span<const int> y, std::vector<std::size_t> rows, std::size_t depth,
                     const TreeOptions& options, Rng& rng) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        std::vector<double> counts(num_classes_, 0.0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(y[r])] += 1.0;
        nodes_[id].counts = counts;

        const double total = static_cast<double>(rows.size());
        const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
        if (pure || (options.max_depth && depth >= *options.max_depth)) return id;

        const double parent = gini(counts, total);
        int best_feature = -1;
        double best_gain = 0.0;
        std::vector<double> right(num_classes_);
        for (std::size_t f : detail::split_candidates(x.cols(), options.max_features, rng)) {
            std::fill(right.begin(), right.end(), 0.0);
            double n_right = 0.0;
            for (std::size_t r : rows) {
                if (x(r, f) != 0.0) {
                    right[static_cast<std::size_t>(y[r])] += 1.0;
                    n_right += 1.0;
                }
            }
            const double n_left = total - n_right;
            if (n_right == 0.0 || n_left == 0.0) continue;
            std::vector<double> left(num_classes_);
            for (std::size_t c = 0; c < num_classes_; ++c) left[c] = counts[c] - right[c];
            const double gain =
                parent - (n_left / total) * gini(left, n_left) - (n_right / total) * gini(right, n_right);
            if (gain > best_gain + kSplitTolerance) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> lrows, rrows;
        for (std::size_t r : rows) (x(r, static_cast<std::size_t>(best_feature)) != 0.0 ? rrows : lrows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        nodes_[id].feature = best_feature;
        const std::size_t l = grow(x, y, std::move(lrows), depth + 1, options, rng);
        const std::size_t r = grow(x, y, std::move(rrows), depth + 1, options, rng);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    std::size_t num_classes_ = 0;
    std::size_t num_features_ = 0;
    std::vector<TreeNode> nodes_;
};

/// Least-squares regression tree used by gradient boosting. Leaf outputs are
/// assigned by a caller-supplied rule over the row indices reaching the leaf.
class RegressionTree {
public:
    RegressionTree() = default;

    template <class LeafValue>
    static RegressionTree fit(const Tensor& x, std::span<const double> target, std::size_t max_depth,
                              LeafValue&& leaf_value) {
        if (x.rows() == 0 || target.size() != x.rows()) throw DimensionError("regression target size mismatch");
        RegressionTree t;
        t.num_features_ = x.cols();
        std::vector<std::size_t> rows(x.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        t.grow(x, target, std::move(rows), 0, max_depth, leaf_value);
        return t;
    }

    double predict_row(std::span<const double> row) const {
        std::size_t i = 0;
        while (!nodes_[i].is_leaf()) i = row[static_cast<std::size_t>(nodes_[i].feature)] != 0.0 ? nodes_[i].right : nodes_[i].left;
        return nodes_[i].value;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::vector<TreeNode>& nodes_mut() noexcept { return nodes_; }

    nlohmann::ordered_json to_json() const { return detail::nodes_to_json(nodes_); }

    static RegressionTree from_json(const nlohmann::ordered_json& j, std::size_t num_features) {
        RegressionTree t;
        t.num_features_ = num_features;
        t.nodes_ = detail::nodes_from_json(j);
        if (t.nodes_.empty()) throw DataError("regression tree checkpoint has no nodes");
        return t;
    }

    bool operator==(const RegressionTree&) const = default;

private:
    template <class LeafValue>
    std::size_t grow(const Tensor& x, std::span<const double> target, std::vector<std::size_t> rows,
                     std::size_t depth, std::size_t max_depth, LeafValue& leaf_value) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        nodes_[id].value = leaf_value(std::span<const std::size_t>(rows));

        const double n = static_cast<double>(rows.size());
        double sum = 0.0;
        for (std::size_t r : rows) sum += target[r];
        if (depth >= max_depth || rows.size() < 2) return id;

        // Maximizing the SSE decrease is maximizing S_l^2/n_l + S_r^2/n_r.
        const double parent = sum * sum / n;
        int best_feature = -1;
        double best_gain = 0.0;
        for (std::size_t f = 0; f < x.cols(); ++f) {
            double s_right = 0.0, n_right = 0.0;
            for (std::size_t r : rows) {
                if (x(r, f) != 0.0) {
                    s_right += target[r];
                    n_right += 1.0;
                }
            }
            const double n_left = n - n_right;
            if (n_right == 0.0 || n_left == 0.0) continue;
            const double s_left = sum - s_right;
            const double gain = s_left * s_left / n_left + s_right * s_right / n_right - parent;
            if (gain > best_gain + kSplitTolerance) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> lrows, rrows;
        for (std::size_t r : rows) (x(r, static_cast<std::size_t>(best_feature)) != 0.0 ? rrows : lrows).push_back(r);
        nodes_[id].feature = best_feature;
        const std::size_t l = grow(x, target, std::move(lrows), depth + 1, max_depth, leaf_value);
        const std::size_t r = grow(x, target, std::move(rrows), depth + 1, max_depth, leaf_value);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    std::size_t num_features_ = 0;
    std::vector<TreeNode> nodes_;
};

} // namespace oncograph
