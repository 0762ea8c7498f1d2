#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"
#include "oncograph/ingest/cohort.hpp"

namespace oncograph {

/// Pathogenic and VUS occurrences of one gene are separate features.
enum class FeatureKind : int { phenotype = 0, pathogenic = 1, vus = 2 };

inline std::string_view to_string(FeatureKind k) {
    switch (k) {
    case FeatureKind::phenotype: return "phenotype";
    case FeatureKind::pathogenic: return "gene-pathogenic";
    case FeatureKind::vus: return "gene-vus";
    }
    return "?";
}

struct FeatureKey {
    FeatureKind kind;
    std::string name;

    friend auto operator<=>(const FeatureKey&, const FeatureKey&) = default;
    friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
};

/// General terms removed before frequency filtering.
inline std::vector<std::string> default_stop_terms() {
    return {"cyst",     "pain",    "carcinoma",       "neoplasm",
            "symptoms", "disease", "minor (disease)", "sarcoma - category (morphologic abnormality)"};
}

struct VocabularyOptions {
    /// Phenotypes seen in at least this many patients are kept.
    std::size_t phenotype_threshold = 20;
    /// Gene features seen in more than this many patients are kept.
    std::size_t gene_threshold = 10;
    std::vector<std::string> stop_terms = default_stop_terms();
};

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Ordered feature list: phenotypes, then pathogenic genes, then VUS genes,
/// each section sorted by name.
class FeatureVocabulary {
public:
    FeatureVocabulary() = default;

    FeatureVocabulary(std::vector<FeatureKey> keys, std::vector<std::size_t> counts, VocabularyOptions options)
        : keys_(std::move(keys)), counts_(std::move(counts)), options_(std::move(options)) {
        if (keys_.size() != counts_.size()) throw UsageError("vocabulary keys and counts differ in length");
        if (!std::is_sorted(keys_.begin(), keys_.end())) throw UsageError("vocabulary keys must be canonical");
        for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], i);
    }

    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }
    const std::vector<FeatureKey>& keys() const noexcept { return keys_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    const VocabularyOptions& options() const noexcept { return options_; }

    std::size_t count(FeatureKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(keys_.begin(), keys_.end(), [kind](const FeatureKey& k) { return k.kind == kind; }));
    }

    std::optional<std::size_t> index_of(const FeatureKey& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Identity of the feature list (kinds and names, not counts).
    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto& k : keys_) {
            h = fnv1a(to_string(k.kind), h);
            h = fnv1a("\t", h);
            h = fnv1a(k.name, h);
            h = fnv1a("\n", h);
        }
        return h;
    }

    /// Tab-separated `index kind key count`, one feature per line.
    void write_tsv(std::ostream& out) const {
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            out << i << '\t' << to_string(keys_[i].kind) << '\t' << keys_[i].name << '\t' << counts_[i] << '\n';
        }
    }

    std::string to_tsv() const {
        std::ostringstream out;
        write_tsv(out);
        return out.str();
    }

private:
    std::vector<FeatureKey> keys_;
    std::vector<std::size_t> counts_;
    VocabularyOptions options_;
    std::map<FeatureKey, std::size_t> index_;
};

/// Surviving features of one patient, in vocabulary order.
inline std::vector<std::size_t> patient_feature_indices(const PatientRecord& r, const FeatureVocabulary& vocab) {
    std::vector<std::size_t> out;
    auto collect = [&](FeatureKind kind, const std::set<std::string>& names) {
        for (const auto& n : names)
            if (auto i = vocab.index_of({kind, n})) out.push_back(*i);
    };
    collect(FeatureKind::phenotype, r.phenotypes);
    collect(FeatureKind::pathogenic, r.pathogenic);
    collect(FeatureKind::vus, r.vus);
    std::sort(out.begin(), out.end());
    return out;
}

/// Counts distinct patients per feature, drops stop terms (case-insensitive),
/// keeps phenotypes with count >= phenotype_threshold and gene features with
/// count > gene_threshold.
inline FeatureVocabulary build_vocabulary(const Cohort& cohort, VocabularyOptions options = {}) {
    if (cohort.empty()) throw UsageError("cannot build a vocabulary from an empty cohort");
    std::set<std::string> stop;
    for (const auto& t : options.stop_terms) stop.insert(ascii_lower(t));
    std::map<FeatureKey, std::size_t> counts;
    for (const auto& r : cohort) {
        for (const auto& p : r.phenotypes)
            if (!stop.contains(ascii_lower(p))) ++counts[{FeatureKind::phenotype, p}];
        for (const auto& g : r.pathogenic) ++counts[{FeatureKind::pathogenic, g}];
        for (const auto& g : r.vus) ++counts[{FeatureKind::vus, g}];
    }
    std::vector<FeatureKey> keys;
    std::vector<std::size_t> kept_counts;
    for (const auto& [key, n] : counts) {
        const bool keep = key.kind == FeatureKind::phenotype ? n >= options.phenotype_threshold
                                                             : n > options.gene_threshold;
        if (keep) {
            keys.push_back(key);
            kept_counts.push_back(n);
        }
    }
    return FeatureVocabulary(std::move(keys), std::move(kept_counts), std::move(options));
}

/// Patients x features 0/1 matrix; features outside the vocabulary are ignored.
inline Tensor encode_multihot(const Cohort& cohort, const FeatureVocabulary& vocab) {
    if (cohort.empty() || vocab.empty()) throw ConfigError("multi-hot encoding needs patients and features");
    Tensor x({cohort.size(), vocab.size()});
    for (std::size_t i = 0; i < cohort.size(); ++i)
        for (std::size_t j : patient_feature_indices(cohort[i], vocab)) x(i, j) = 1.0;
    return x;
}

/// Feature keys of the nonzero columns of one multi-hot row.
inline std::vector<FeatureKey> decode_multihot_row(std::span<const double> row, const FeatureVocabulary& vocab) {
    std::vector<FeatureKey> out;
    for (std::size_t j = 0; j < row.size() && j < vocab.size(); ++j)
        if (row[j] != 0.0) out.push_back(vocab.keys()[j]);
    return out;
}

} // namespace oncograph
