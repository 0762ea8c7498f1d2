#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "oncograph/core/rng.hpp"
#include "oncograph/ingest/cohort.hpp"

namespace oncograph::testing {

inline std::string random_token(Rng& rng, std::string_view alphabet, std::size_t min_len, std::size_t max_len) {
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    return s;
}

// Multi-byte pieces are drawn whole so terms stay valid UTF-8.
inline std::string random_term(Rng& rng) {
    static const std::vector<std::string> pieces = {"a", "b", "Z", " ", ":", "0", "9", "\"", "\\", "/", "\t",
                                                    "-", "(", ")", "\xc3\xa9", "\xe2\x82\xac"};
    std::string s;
    for (std::size_t len = 1 + rng.below(12); len > 0; --len) s += pieces[rng.below(pieces.size())];
    return s;
}

// Records whose ids and gene symbols fit the report format; phenotype terms
// may contain anything JSON can carry.
inline Cohort random_cohort(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    constexpr std::string_view gene_chars = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-";
    Cohort c;
    for (std::size_t i = 0; i < n; ++i) {
        PatientRecord r;
        r.id = "id-" + std::to_string(i) + "-" + random_token(rng, gene_chars, 1, 6);
        r.cancer_type = static_cast<CancerType>(rng.below(kNumCancerTypes));
        for (std::size_t k = rng.below(6); k > 0; --k) r.phenotypes.insert(random_term(rng));
        for (std::size_t k = rng.below(5); k > 0; --k) r.pathogenic.insert(random_token(rng, gene_chars, 1, 8));
        for (std::size_t k = rng.below(5); k > 0; --k) r.vus.insert(random_token(rng, gene_chars, 1, 8));
        c.push_back(std::move(r));
    }
    return c;
}

inline Cohort blank_cohort(std::size_t n) {
    Cohort c(n);
    for (std::size_t i = 0; i < n; ++i) c[i].id = "p" + std::to_string(i);
    return c;
}

} // namespace oncograph::testing
