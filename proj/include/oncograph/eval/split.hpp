#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/rng.hpp"

namespace oncograph {

struct SplitRatios {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;

    void validate() const {
        if (!(train > 0.0 && val > 0.0 && test > 0.0)) throw ConfigError("split ratios must be positive");
        if (std::abs(train + val + test - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
    }
};

struct SplitMasks {
    std::vector<std::size_t> train; ///< sorted positions into the label vector
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
    SplitRatios ratios;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    bool operator==(const SplitMasks& o) const { return train == o.train && val == o.val && test == o.test; }
};

/// Largest-remainder allocation of n items over the ratios; ties in the
/// remainder favor the earlier split (train, then val, then test).
inline std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& r) {
    const std::array<double, 3> ratios = {r.train, r.val, r.test};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double raw = static_cast<double>(n) * ratios[i];
        // Nudge so products like 10 * 0.7 land on the integer they denote.
        counts[i] = static_cast<std::size_t>(std::floor(raw + 1e-9));
        remainder[i] = raw - static_cast<double>(counts[i]);
        used += counts[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; used < n; ++k, ++used) ++counts[order[k % 3]];
    return counts;
}

/// Per-class shuffled, proportional split of the labeled positions (label >= 0).
/// Classes with fewer than three samples go entirely to train with a warning.
inline SplitMasks stratified_split(std::span<const int> labels, const SplitRatios& ratios = {}, std::uint64_t seed = 42) {
    ratios.validate();
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) by_class[labels[i]].push_back(i);
    if (by_class.empty()) throw ConfigError("no labeled samples to split");

    SplitMasks m;
    m.ratios = ratios;
    m.seed = seed;
    for (auto& [cls, idx] : by_class) {
        if (idx.size() < 3) {
            m.warnings.push_back("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                                 " samples; all assigned to train");
            m.train.insert(m.train.end(), idx.begin(), idx.end());
            continue;
        }
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(std::span<std::size_t>(idx));
        const auto counts = allocate_counts(idx.size(), ratios);
        m.train.insert(m.train.end(), idx.begin(), idx.begin() + counts[0]);
        m.val.insert(m.val.end(), idx.begin() + counts[0], idx.begin() + counts[0] + counts[1]);
        m.test.insert(m.test.end(), idx.begin() + counts[0] + counts[1], idx.end());
    }
    std::sort(m.train.begin(), m.train.end());
    std::sort(m.val.begin(), m.val.end());
    std::sort(m.test.begin(), m.test.end());
    return m;
}

} // namespace oncograph
