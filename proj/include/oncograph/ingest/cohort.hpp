#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "oncograph/core/error.hpp"

namespace oncograph {

/// The seven cancer classes. The enumerator value is the class index.
enum class CancerType : int { lung = 0, prostate, breast, ovarian, pancreas, colon_rectum, liver };

inline constexpr std::size_t kNumCancerTypes = 7;

inline constexpr std::array<std::string_view, kNumCancerTypes> kCancerTypeKeys = {
    "lung", "prostate", "breast", "ovarian", "pancreas", "colon_rectum", "liver"};

inline constexpr std::array<std::string_view, kNumCancerTypes> kCancerTypeLabels = {
    "Lung", "Prostate", "Breast", "Ovarian", "Pancreas", "Colon/Rectum", "Liver"};

inline std::string_view to_string(CancerType t) { return kCancerTypeKeys[static_cast<std::size_t>(t)]; }
inline std::string_view display_name(CancerType t) { return kCancerTypeLabels[static_cast<std::size_t>(t)]; }
inline int class_index(CancerType t) { return static_cast<int>(t); }

inline std::optional<CancerType> parse_cancer_type(std::string_view key) {
    for (std::size_t i = 0; i < kNumCancerTypes; ++i) {
        if (kCancerTypeKeys[i] == key) return static_cast<CancerType>(i);
    }
    return std::nullopt;
}

struct PatientRecord {
    std::string id;
    CancerType cancer_type = CancerType::lung;
    std::set<std::string> phenotypes;
    std::set<std::string> pathogenic;
    std::set<std::string> vus;

    friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

using Cohort = std::vector<PatientRecord>;

/// Rejects empty or duplicate patient ids.
inline void validate_cohort(const Cohort& cohort) {
    std::unordered_set<std::string> seen;
    for (const auto& r : cohort) {
        if (r.id.empty()) throw DataError("patient id must be nonempty");
        if (!seen.insert(r.id).second) throw DataError("duplicate patient id '" + r.id + "'");
    }
}

// ---------------------------------------------------------------------------
// Line-delimited JSON cohort files: one object per line with keys
// patient_id, cancer_type, phenotypes, pathogenic, vus.

inline std::string to_json_line(const PatientRecord& r) {
    nlohmann::ordered_json j;
    j["patient_id"] = r.id;
    j["cancer_type"] = std::string(to_string(r.cancer_type));
    j["phenotypes"] = r.phenotypes;
    j["pathogenic"] = r.pathogenic;
    j["vus"] = r.vus;
    return j.dump();
}

namespace detail {

inline std::set<std::string> string_set(const nlohmann::json& j, const char* key, std::size_t line) {
    if (!j.contains(key)) return {};
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw ParseError(std::string("'") + key + "' must be an array of strings", line);
    std::set<std::string> out;
    for (const auto& item : arr) {
        if (!item.is_string()) throw ParseError(std::string("'") + key + "' must be an array of strings", line);
        out.insert(item.get<std::string>());
    }
    return out;
}

} // namespace detail

inline PatientRecord parse_json_line(std::string_view text, std::size_t line = 0) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed record: ") + e.what(), line);
    }
    if (!j.is_object()) throw ParseError("record must be a JSON object", line);
    if (!j.contains("patient_id") || !j["patient_id"].is_string()) throw ParseError("missing string 'patient_id'", line);
    if (!j.contains("cancer_type") || !j["cancer_type"].is_string()) {
        throw ParseError("missing string 'cancer_type'", line);
    }
    PatientRecord r;
    r.id = j["patient_id"].get<std::string>();
    const auto type_key = j["cancer_type"].get<std::string>();
    const auto type = parse_cancer_type(type_key);
    if (!type) {
        throw DataError((line ? "line " + std::to_string(line) + ": " : std::string()) + "unknown cancer_type '" +
                        type_key + "'");
    }
    r.cancer_type = *type;
    r.phenotypes = detail::string_set(j, "phenotypes", line);
    r.pathogenic = detail::string_set(j, "pathogenic", line);
    r.vus = detail::string_set(j, "vus", line);
    return r;
}

inline Cohort read_cohort(std::istream& in) {
    Cohort cohort;
    std::string text;
    std::size_t line = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        PatientRecord r = parse_json_line(text, line);
        if (r.id.empty()) throw DataError("line " + std::to_string(line) + ": empty patient_id");
        if (!seen.insert(r.id).second) {
            throw DataError("line " + std::to_string(line) + ": duplicate patient_id '" + r.id + "'");
        }
        cohort.push_back(std::move(r));
    }
    return cohort;
}

inline Cohort load_cohort(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open cohort file '" + path + "'");
    return read_cohort(in);
}

inline void write_cohort(std::ostream& out, const Cohort& cohort) {
    for (const auto& r : cohort) out << to_json_line(r) << '\n';
}

inline void save_cohort(const std::string& path, const Cohort& cohort) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write cohort file '" + path + "'");
    write_cohort(out, cohort);
}

inline std::vector<int> cohort_labels(const Cohort& cohort) {
    std::vector<int> y;
    y.reserve(cohort.size());
    for (const auto& r : cohort) y.push_back(class_index(r.cancer_type));
    return y;
}

} // namespace oncograph
