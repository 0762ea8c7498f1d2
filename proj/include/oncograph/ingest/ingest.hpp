#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/ingest/cohort.hpp"
#include "oncograph/ingest/report.hpp"

namespace oncograph {

/// Phenotype terms per patient id from `patient_id<TAB>term` lines.
/// Blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::set<std::string>> read_phenotype_tsv(std::istream& in) {
    std::map<std::string, std::set<std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("expected 'patient_id<TAB>term'", line_no);
        const std::string id(detail::trim(std::string_view(line).substr(0, tab)));
        const std::string term(detail::trim(std::string_view(line).substr(tab + 1)));
        if (id.empty() || term.empty()) throw ParseError("empty patient id or term", line_no);
        out[id].insert(term);
    }
    return out;
}

inline void write_phenotype_tsv(std::ostream& out, const Cohort& cohort) {
    for (const auto& r : cohort)
        for (const auto& t : r.phenotypes) out << r.id << '\t' << t << '\n';
}

struct IngestResult {
    Cohort cohort;
    std::vector<std::string> warnings;
};

/// Builds a cohort from one report file per patient (*.txt in reports_dir,
/// read in file-name order) plus a phenotype table. A report without a
/// PATIENT ID line takes the file stem as id. Every unreadable report is
/// listed in a single ParseError; phenotype rows for unknown patients are
/// reported as warnings.
inline IngestResult ingest_reports(const std::filesystem::path& reports_dir,
                                   const std::filesystem::path& phenotypes_path) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(reports_dir)) throw ParseError("report directory '" + reports_dir.string() + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(reports_dir))
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError("no reports found in '" + reports_dir.string() + "'");

    std::map<std::string, std::set<std::string>> phenotypes;
    {
        std::ifstream in(phenotypes_path);
        if (!in) throw ParseError("cannot open phenotype table '" + phenotypes_path.string() + "'");
        try {
            phenotypes = read_phenotype_tsv(in);
        } catch (const ParseError& e) {
            throw ParseError(phenotypes_path.filename().string() + ": " + e.what());
        }
    }

    IngestResult result;
    std::vector<std::string> failures;
    std::set<std::string> seen;
    for (const auto& file : files) {
        const std::string name = file.filename().string();
        try {
            std::ifstream in(file, std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            ParsedReport rep = parse_report_text(buf.str());
            PatientRecord r;
            r.id = rep.patient_id.value_or(file.stem().string());
            if (r.id.empty()) throw ParseError("empty patient id");
            if (!rep.cancer_type) throw ParseError("report has no CANCER TYPE line");
            if (!seen.insert(r.id).second) throw ParseError("duplicate patient id '" + r.id + "'");
            r.cancer_type = *rep.cancer_type;
            r.pathogenic = std::move(rep.pathogenic);
            r.vus = std::move(rep.vus);
            if (auto it = phenotypes.find(r.id); it != phenotypes.end()) r.phenotypes = it->second;
            for (const auto& w : rep.warnings) result.warnings.push_back(name + ": " + w);
            result.cohort.push_back(std::move(r));
        } catch (const Error& e) {
            failures.push_back(name + ": " + e.what());
        }
    }
    if (!failures.empty()) {
        std::string msg = std::to_string(failures.size()) + " report(s) failed to parse";
        for (const auto& f : failures) msg += "\n  " + f;
        throw ParseError(msg);
    }
    for (const auto& [id, _] : phenotypes)
        if (!seen.count(id)) result.warnings.push_back("phenotypes for unknown patient '" + id + "' ignored");
    return result;
}

/// Writes <id>.txt reports and phenotypes.tsv for a cohort, the inverse of ingest_reports.
inline void export_reports(const Cohort& cohort, const std::filesystem::path& reports_dir,
                           const std::filesystem::path& phenotypes_path) {
    std::filesystem::create_directories(reports_dir);
    for (const auto& r : cohort) {
        std::ofstream out(reports_dir / (r.id + ".txt"), std::ios::binary);
        if (!out) throw ConfigError("cannot write report for '" + r.id + "'");
        out << render_report(r);
    }
    std::ofstream out(phenotypes_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + phenotypes_path.string() + "'");
    write_phenotype_tsv(out, cohort);
}

} // namespace oncograph
