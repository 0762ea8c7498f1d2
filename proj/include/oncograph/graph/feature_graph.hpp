#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/sparse.hpp"
#include "oncograph/core/tensor.hpp"
#include "oncograph/ingest/cohort.hpp"
#include "oncograph/ingest/vocabulary.hpp"

namespace oncograph {

enum class NodeKind : int { phenotype = 0, gene_pathogenic, gene_vus, patient };

inline std::string_view to_string(NodeKind k) {
    switch (k) {
    case NodeKind::phenotype: return "phenotype";
    case NodeKind::gene_pathogenic: return "gene-pathogenic";
    case NodeKind::gene_vus: return "gene-vus";
    case NodeKind::patient: return "patient";
    }
    return "?";
}

inline NodeKind node_kind_of(FeatureKind k) {
    switch (k) {
    case FeatureKind::phenotype: return NodeKind::phenotype;
    case FeatureKind::pathogenic: return NodeKind::gene_pathogenic;
    case FeatureKind::vus: return NodeKind::gene_vus;
    }
    return NodeKind::phenotype;
}

struct GraphNode {
    NodeKind kind;
    std::string name;

    friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected node-typed graph with one feature row per node.
///
/// Edges are stored once with first < second; the adjacency matrix holds both
/// directions. Labels are class indices, -1 for unlabeled nodes.
class FeatureGraph {
public:
    FeatureGraph() = default;

    FeatureGraph(std::vector<GraphNode> nodes, std::vector<Edge> edges, Tensor features, std::vector<int> labels,
                 std::uint64_t vocab_hash = 0)
        : nodes_(std::move(nodes)), edges_(std::move(edges)), features_(std::move(features)),
          labels_(std::move(labels)), vocab_hash_(vocab_hash) {
        const std::size_t n = nodes_.size();
        if (n == 0) throw UsageError("graph needs at least one node");
        if (features_.rank() != 2 || features_.rows() != n) {
            throw DimensionError("feature matrix must have one row per node");
        }
        if (labels_.empty()) labels_.assign(n, -1);
        if (labels_.size() != n) throw DimensionError("label vector must have one entry per node");
        for (auto& e : edges_) {
            if (e.first == e.second) throw DataError("self-edge on node " + std::to_string(e.first));
            if (e.first >= n || e.second >= n) throw DataError("edge references a missing node");
            if (e.first > e.second) std::swap(e.first, e.second);
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw DataError("duplicate edge");
        std::vector<Triplet> trips;
        trips.reserve(2 * edges_.size());
        for (const auto& [a, b] : edges_) {
            trips.push_back({a, b, 1.0});
            trips.push_back({b, a, 1.0});
        }
        adjacency_ = SparseMatrix::from_triplets(n, n, std::move(trips));
        for (std::size_t i = 0; i < n; ++i)
            if (nodes_[i].kind == NodeKind::patient) patient_nodes_.push_back(i);
    }

    /// Unnamed nodes of kind phenotype; convenient for synthetic test graphs.
    static FeatureGraph from_edges(std::size_t n, std::vector<Edge> edges, Tensor features,
                                   std::vector<int> labels = {}) {
        std::vector<GraphNode> nodes(n, GraphNode{NodeKind::phenotype, ""});
        for (std::size_t i = 0; i < n; ++i) nodes[i].name = "n" + std::to_string(i);
        return FeatureGraph(std::move(nodes), std::move(edges), std::move(features), std::move(labels));
    }

    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::size_t num_features() const noexcept { return features_.cols(); }

    const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Tensor& features() const noexcept { return features_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const SparseMatrix& adjacency() const noexcept { return adjacency_; }
    const std::vector<std::size_t>& patient_nodes() const noexcept { return patient_nodes_; }
    std::uint64_t vocab_hash() const noexcept { return vocab_hash_; }

    /// Ids of cohort patients left out because no feature survived filtering.
    const std::vector<std::string>& skipped_patients() const noexcept { return skipped_; }
    void set_skipped_patients(std::vector<std::string> ids) { skipped_ = std::move(ids); }

    std::size_t degree(std::size_t i) const { return adjacency_.row_end(i) - adjacency_.row_begin(i); }

    std::span<const std::size_t> neighbors(std::size_t i) const {
        return adjacency_.indices().subspan(adjacency_.row_begin(i), degree(i));
    }

    bool has_edge(std::size_t a, std::size_t b) const { return adjacency_.at(a, b) != 0.0; }

    /// Labels of the patient nodes in patient_nodes() order.
    std::vector<int> patient_labels() const {
        std::vector<int> y;
        for (std::size_t i : patient_nodes_) y.push_back(labels_[i]);
        return y;
    }

    friend bool operator==(const FeatureGraph& a, const FeatureGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.features_ == b.features_ &&
               a.labels_ == b.labels_ && a.vocab_hash_ == b.vocab_hash_;
    }

private:
    std::vector<GraphNode> nodes_;
    std::vector<Edge> edges_;
    Tensor features_;
    std::vector<int> labels_;
    std::uint64_t vocab_hash_ = 0;
    SparseMatrix adjacency_;
    std::vector<std::size_t> patient_nodes_;
    std::vector<std::string> skipped_;
};

/// Builds the phenotype-gene co-occurrence graph.
///
/// One node per vocabulary feature (in vocabulary order), then optionally one
/// node per patient (sorted by id). A phenotype and a gene feature are linked
/// when some patient carries both; a patient is linked to each of its
/// surviving features. Feature nodes get one-hot rows, patient nodes their
/// multi-hot rows. Patients with no surviving feature are left out and listed
/// in skipped_patients().
inline FeatureGraph build_feature_graph(const Cohort& cohort, const FeatureVocabulary& vocab,
                                        bool include_patient_nodes = true) {
    if (cohort.empty()) throw UsageError("cannot build a graph from an empty cohort");
    if (vocab.empty()) throw ConfigError("vocabulary is empty; no feature survived filtering");

    std::vector<std::size_t> order(cohort.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cohort[a].id < cohort[b].id; });

    const std::size_t f = vocab.size();
    std::vector<GraphNode> nodes;
    for (const auto& key : vocab.keys()) nodes.push_back({node_kind_of(key.kind), key.name});

    std::set<Edge> edges;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> patients;
    std::vector<std::string> skipped;
    for (std::size_t idx : order) {
        auto feats = patient_feature_indices(cohort[idx], vocab);
        if (feats.empty()) {
            skipped.push_back(cohort[idx].id);
            continue;
        }
        for (std::size_t a : feats) {
            if (vocab.keys()[a].kind != FeatureKind::phenotype) continue;
            for (std::size_t b : feats)
                if (vocab.keys()[b].kind != FeatureKind::phenotype) edges.emplace(std::min(a, b), std::max(a, b));
        }
        patients.emplace_back(idx, std::move(feats));
    }

    std::vector<int> labels(f, -1);
    const std::size_t n = f + (include_patient_nodes ? patients.size() : 0);
    Tensor x({n, f});
    for (std::size_t i = 0; i < f; ++i) x(i, i) = 1.0;
    if (include_patient_nodes) {
        for (const auto& [idx, feats] : patients) {
            const std::size_t node = nodes.size();
            nodes.push_back({NodeKind::patient, cohort[idx].id});
            labels.push_back(class_index(cohort[idx].cancer_type));
            for (std::size_t j : feats) {
                edges.emplace(j, node);
                x(node, j) = 1.0;
            }
        }
    }
    FeatureGraph g(std::move(nodes), std::vector<Edge>(edges.begin(), edges.end()), std::move(x), std::move(labels),
                   vocab.hash());
    g.set_skipped_patients(std::move(skipped));
    return g;
}

/// Relabels node i as perm[i]; features, labels and edges move with their nodes.
inline FeatureGraph permute_graph(const FeatureGraph& g, std::span<const std::size_t> perm) {
    const std::size_t n = g.num_nodes();
    if (perm.size() != n) throw UsageError("permutation length differs from node count");
    std::vector<bool> hit(n, false);
    for (std::size_t p : perm) {
        if (p >= n || hit[p]) throw UsageError("permutation is not a bijection");
        hit[p] = true;
    }
    std::vector<GraphNode> nodes(n);
    std::vector<int> labels(n);
    Tensor x({n, g.num_features()});
    for (std::size_t i = 0; i < n; ++i) {
        nodes[perm[i]] = g.nodes()[i];
        labels[perm[i]] = g.labels()[i];
        const auto src = g.features().row(i);
        std::copy(src.begin(), src.end(), x.row(perm[i]).begin());
    }
    std::vector<Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto& [a, b] : g.edges()) edges.emplace_back(perm[a], perm[b]);
    FeatureGraph out(std::move(nodes), std::move(edges), std::move(x), std::move(labels), g.vocab_hash());
    out.set_skipped_patients(g.skipped_patients());
    return out;
}

// Export formats: an edge list `src_id<TAB>dst_id` and a node manifest
// `id<TAB>kind<TAB>name`, one line each, ids are node indices.

inline void write_edge_list(std::ostream& out, const FeatureGraph& g) {
    for (const auto& [a, b] : g.edges()) out << a << '\t' << b << '\n';
}

inline void write_node_manifest(std::ostream& out, const FeatureGraph& g) {
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
        out << i << '\t' << to_string(g.nodes()[i].kind) << '\t' << g.nodes()[i].name << '\n';
}

} // namespace oncograph
