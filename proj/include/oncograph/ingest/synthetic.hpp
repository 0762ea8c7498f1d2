#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "oncograph/core/error.hpp"
#include "oncograph/core/rng.hpp"
#include "oncograph/ingest/cohort.hpp"

namespace oncograph {

/// Parameters of the synthetic cohort generator.
///
/// Every class owns a disjoint set of signature features. A patient carries
/// each of its class's signature features with probability p_signature and
/// every other feature with probability p_background.
struct SyntheticSpec {
    std::array<std::size_t, kNumCancerTypes> class_counts = {223, 66, 53, 91, 104, 140, 107};
    std::size_t signature_features = 12;
    double p_signature = 0.6;
    double p_background = 0.03;
    std::size_t phenotype_vocab = 150;
    std::size_t gene_vocab = 60;
    std::uint64_t seed = 42;

    std::size_t total_patients() const {
        return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    }

    void validate() const {
        for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
            if (class_counts[c] == 0) {
                throw ConfigError("class count for '" + std::string(kCancerTypeKeys[c]) + "' must be positive");
            }
        }
        if (!(p_signature >= 0.0 && p_signature <= 1.0)) throw ConfigError("p_signature must lie in [0, 1]");
        if (!(p_background >= 0.0 && p_background <= 1.0)) throw ConfigError("p_background must lie in [0, 1]");
        if (phenotype_vocab + gene_vocab == 0) throw ConfigError("synthetic vocabulary is empty");
        if (signature_features * kNumCancerTypes > phenotype_vocab + gene_vocab) {
            throw ConfigError("signature demand " + std::to_string(signature_features * kNumCancerTypes) +
                              " exceeds synthetic vocabulary size " + std::to_string(phenotype_vocab + gene_vocab));
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        nlohmann::ordered_json counts;
        for (std::size_t c = 0; c < kNumCancerTypes; ++c) counts[std::string(kCancerTypeKeys[c])] = class_counts[c];
        j["class_counts"] = counts;
        j["signature_features"] = signature_features;
        j["p_signature"] = p_signature;
        j["p_background"] = p_background;
        j["phenotype_vocab"] = phenotype_vocab;
        j["gene_vocab"] = gene_vocab;
        j["seed"] = seed;
        return j;
    }
};

namespace detail {

inline std::string numbered(const char* fmt, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, i);
    return buf;
}

} // namespace detail

inline std::string synthetic_phenotype_term(std::size_t i) { return detail::numbered("HP:9%06zu", i + 1); }
inline std::string synthetic_gene_symbol(std::size_t i) { return detail::numbered("SG%03zu", i + 1); }
/// Two of every three synthetic genes report as pathogenic, the rest as VUS.
inline bool synthetic_gene_is_pathogenic(std::size_t i) { return i % 3 != 2; }

/// Patients are emitted in id order P0001, P0002, ... grouped by class.
inline Cohort generate_synthetic_cohort(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t universe = spec.phenotype_vocab + spec.gene_vocab;
    Rng rng(mix_seed(spec.seed, 1));

    std::vector<std::size_t> order(universe);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> owner(universe, -1);
    for (std::size_t c = 0; c < kNumCancerTypes; ++c)
        for (std::size_t k = 0; k < spec.signature_features; ++k)
            owner[order[c * spec.signature_features + k]] = static_cast<int>(c);

    const std::size_t total = spec.total_patients();
    const int width = total >= 10000 ? static_cast<int>(std::to_string(total).size()) : 4;
    Cohort cohort;
    cohort.reserve(total);
    std::size_t serial = 0;
    for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
        for (std::size_t n = 0; n < spec.class_counts[c]; ++n) {
            PatientRecord r;
            char id[32];
            std::snprintf(id, sizeof id, "P%0*zu", width, ++serial);
            r.id = id;
            r.cancer_type = static_cast<CancerType>(c);
            for (std::size_t f = 0; f < universe; ++f) {
                const double p = owner[f] == static_cast<int>(c) ? spec.p_signature : spec.p_background;
                if (!rng.bernoulli(p)) continue;
                if (f < spec.phenotype_vocab) {
                    r.phenotypes.insert(synthetic_phenotype_term(f));
                } else {
                    const std::size_t g = f - spec.phenotype_vocab;
                    (synthetic_gene_is_pathogenic(g) ? r.pathogenic : r.vus).insert(synthetic_gene_symbol(g));
                }
            }
            cohort.push_back(std::move(r));
        }
    }
    return cohort;
}

} // namespace oncograph
