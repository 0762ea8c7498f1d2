#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/ingest/cohort.hpp"

namespace oncograph {

// Plain-text genetic report layout:
//
//   PATIENT ID: <id>
//   CANCER TYPE: <type>                  (optional)
//   GENOMIC FINDINGS
//     <GENE> <variant...>
//   VARIANTS OF UNKNOWN SIGNIFICANCE
//     <GENE> <variant...>
//
// Entry lines are indented; the gene symbol is the first token.

inline constexpr std::string_view kPatientIdPrefix = "PATIENT ID:";
inline constexpr std::string_view kCancerTypePrefix = "CANCER TYPE:";
inline constexpr std::string_view kFindingsHeader = "GENOMIC FINDINGS";
inline constexpr std::string_view kVusHeader = "VARIANTS OF UNKNOWN SIGNIFICANCE";

struct ParsedReport {
    std::optional<std::string> patient_id;
    std::optional<CancerType> cancer_type;
    std::set<std::string> pathogenic;
    std::set<std::string> vus;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline ParsedReport parse_report_text(std::string_view text) {
    enum class Section { none, findings, vus, unknown };
    ParsedReport report;
    Section section = Section::none;
    bool saw_findings = false;
    bool saw_vus = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view body = detail::trim(line);
        if (body.empty()) continue;
        const bool indented = line.front() == ' ' || line.front() == '\t';
        if (indented) {
            std::string gene(body.substr(0, body.find_first_of(" \t")));
            switch (section) {
            case Section::findings: report.pathogenic.insert(std::move(gene)); break;
            case Section::vus: report.vus.insert(std::move(gene)); break;
            case Section::unknown: break;
            case Section::none:
                report.warnings.push_back("line " + std::to_string(line_no) + ": entry outside any section ignored");
                break;
            }
        } else if (body.starts_with(kPatientIdPrefix)) {
            report.patient_id = std::string(detail::trim(body.substr(kPatientIdPrefix.size())));
            section = Section::none;
        } else if (body.starts_with(kCancerTypePrefix)) {
            const auto key = detail::trim(body.substr(kCancerTypePrefix.size()));
            report.cancer_type = parse_cancer_type(key);
            if (!report.cancer_type) {
                throw ParseError("unknown cancer type '" + std::string(key) + "'", line_no);
            }
            section = Section::none;
        } else if (body == kFindingsHeader) {
            section = Section::findings;
            saw_findings = true;
        } else if (body == kVusHeader) {
            section = Section::vus;
            saw_vus = true;
        } else {
            report.warnings.push_back("line " + std::to_string(line_no) + ": unknown header '" + std::string(body) +
                                      "', section skipped");
            section = Section::unknown;
        }
    }
    if (!saw_findings && !saw_vus) {
        throw ParseError("report has neither a '" + std::string(kFindingsHeader) + "' nor a '" +
                             std::string(kVusHeader) + "' section",
                         line_no);
    }
    return report;
}

/// Renders the genetic part of a record in the report layout above.
inline std::string render_report(const PatientRecord& r) {
    std::ostringstream out;
    out << kPatientIdPrefix << ' ' << r.id << '\n';
    out << kCancerTypePrefix << ' ' << to_string(r.cancer_type) << '\n';
    out << kFindingsHeader << '\n';
    for (const auto& g : r.pathogenic) out << "  " << g << " alteration\n";
    out << kVusHeader << '\n';
    for (const auto& g : r.vus) out << "  " << g << " variant\n";
    return out.str();
}

} // namespace oncograph
