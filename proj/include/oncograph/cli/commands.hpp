#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oncograph/bench/benchmark.hpp"
#include "oncograph/graph/operators.hpp"

// Subcommand bodies behind tools/oncograph. They throw the library's error
// types; exit_code_for maps those to process exit codes.

namespace oncograph::cli {

enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2, kInputError = 3 };

/// ParseError and DataError are input problems; everything else a configuration problem.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) != nullptr || dynamic_cast<const DataError*>(&e) != nullptr)
        return kInputError;
    return kConfigError;
}

// ---------------------------------------------------------------------------
// Flag value parsing

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = std::min(s.find(sep, start), s.size());
        std::string item(detail::trim(s.substr(start, end - start)));
        if (!item.empty()) out.push_back(std::move(item));
        start = end + 1;
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
    return v;
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(what + ": '" + s + "' is not a nonnegative integer");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + s + "' is out of range");
    }
}

/// "0.7,0.1,0.2" -> ratios.
inline SplitRatios parse_split(const std::string& s) {
    const auto parts = split_list(s);
    if (parts.size() != 3) throw ConfigError("--split needs three comma-separated ratios, got '" + s + "'");
    SplitRatios r{parse_double(parts[0], "--split"), parse_double(parts[1], "--split"),
                  parse_double(parts[2], "--split")};
    r.validate();
    return r;
}

inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& p : split_list(s)) out.push_back(parse_uint(p, "--seeds"));
    if (out.empty()) throw ConfigError("--seeds is empty");
    return out;
}

/// "all" or a comma-separated list of model keys.
inline std::vector<ModelKind> parse_models(const std::string& s) {
    std::vector<ModelKind> out;
    for (const auto& p : split_list(s)) {
        if (p == "all") {
            out.insert(out.end(), kAllModels.begin(), kAllModels.end());
            continue;
        }
        if (p == "gnn" || p == "baselines") {
            for (ModelKind k : kAllModels)
                if (is_gnn(k) == (p == "gnn")) out.push_back(k);
            continue;
        }
        const auto k = parse_model(p);
        if (!k) {
            std::string known;
            for (ModelKind m : kAllModels) known += (known.empty() ? "" : ", ") + std::string(to_string(m));
            throw ConfigError("unknown model '" + p + "' (known: " + known + ")");
        }
        out.push_back(*k);
    }
    if (out.empty()) throw ConfigError("--models selects no model");
    return out;
}

/// "lung=5" entries override synthetic class counts.
inline void apply_counts(SyntheticSpec& spec, const std::vector<std::string>& entries) {
    for (const auto& e : entries) {
        const auto eq = e.find('=');
        if (eq == std::string::npos) throw ConfigError("--count expects type=N, got '" + e + "'");
        const auto type = parse_cancer_type(detail::trim(std::string_view(e).substr(0, eq)));
        if (!type) throw ConfigError("--count: unknown cancer type in '" + e + "'");
        spec.class_counts[static_cast<std::size_t>(*type)] =
            static_cast<std::size_t>(parse_uint(std::string(detail::trim(std::string_view(e).substr(eq + 1))), "--count"));
    }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
    SyntheticSpec spec;
    std::string out = "cohort.jsonl";
    std::optional<std::string> reports_dir; ///< also emit report texts and phenotypes.tsv here
};

/// Writes the cohort file and <out>.manifest.json.
inline int cmd_generate(const GenerateOptions& opts, std::ostream& log) {
    opts.spec.validate();
    const Cohort cohort = generate_synthetic_cohort(opts.spec);
    const std::filesystem::path out(opts.out);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    save_cohort(opts.out, cohort);
    nlohmann::ordered_json manifest;
    manifest["generator"] = "synthetic";
    manifest["spec"] = opts.spec.to_json();
    manifest["records"] = cohort.size();
    write_text(opts.out + ".manifest.json", manifest.dump(2) + "\n");
    if (opts.reports_dir) {
        const std::filesystem::path dir(*opts.reports_dir);
        export_reports(cohort, dir, dir / "phenotypes.tsv");
        log << "wrote " << cohort.size() << " reports to " << dir.string() << "\n";
    }
    log << "wrote " << cohort.size() << " records to " << opts.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
    std::string reports_dir;
    std::string phenotypes;
    std::string out = "cohort.jsonl";
    std::string vocabulary_out; ///< default <out>.vocab.tsv
    VocabularyOptions vocabulary;
};

/// Merges reports and phenotypes into a cohort file, exports the filtered
/// vocabulary, and lists patients left without any surviving feature in
/// <out>.skipped.txt.
inline int cmd_ingest(const IngestOptions& opts, std::ostream& log) {
    IngestResult r = ingest_reports(opts.reports_dir, opts.phenotypes);
    for (const auto& w : r.warnings) log << "warning: " << w << "\n";
    const FeatureVocabulary vocab = build_vocabulary(r.cohort, opts.vocabulary);
    const std::filesystem::path out(opts.out);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    save_cohort(opts.out, r.cohort);
    write_text(opts.vocabulary_out.empty() ? opts.out + ".vocab.tsv" : opts.vocabulary_out, vocab.to_tsv());
    std::string skipped;
    std::size_t n_skipped = 0;
    for (const auto& p : r.cohort) {
        if (patient_feature_indices(p, vocab).empty()) {
            skipped += p.id + "\n";
            ++n_skipped;
        }
    }
    write_text(opts.out + ".skipped.txt", skipped);
    log << "wrote " << r.cohort.size() << " records to " << opts.out << " (" << vocab.size() << " features kept, "
        << n_skipped << " patients without features)\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// bench

inline int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const auto started = std::chrono::system_clock::now();
    const BenchResult result = run_benchmark(config);
    const auto finished = std::chrono::system_clock::now();
    write_outputs(result, started, finished);
    for (const auto& w : result.warnings) log << "warning: " << w << "\n";
    for (const auto& r : result.runs)
        if (!r.ok) log << "error: " << to_string(r.model) << " (seed " << r.seed << "): " << r.error << "\n";
    out << result.tables << "\n" << result.summary;
    return result.all_ok() ? kOk : kPartialFailure;
}

// ---------------------------------------------------------------------------
// inspect-graph

struct InspectOptions {
    RunConfig input; ///< only the input and threshold fields are used
    std::optional<std::string> edges_out;
    std::optional<std::string> nodes_out;
};

inline int cmd_inspect_graph(const InspectOptions& opts, std::ostream& out) {
    const PreparedData data = prepare_data(opts.input);
    const FeatureGraph& g = data.graph;
    std::map<NodeKind, std::size_t> kinds;
    for (const auto& n : g.nodes()) ++kinds[n.kind];
    std::size_t isolated = 0, max_degree = 0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        isolated += g.degree(i) == 0 ? 1 : 0;
        max_degree = std::max(max_degree, g.degree(i));
    }
    const auto lambda = power_iteration(normalized_laplacian(g));
    std::array<std::size_t, kNumCancerTypes> per_class{};
    for (int y : data.patient_labels) ++per_class[static_cast<std::size_t>(y)];

    out << "cohort patients:     " << data.cohort.size() << "\n";
    out << "vocabulary hash:     " << hex64(data.vocabulary.hash()) << "\n";
    out << "features:            " << data.vocabulary.size() << " (phenotype " << data.vocabulary.count(FeatureKind::phenotype)
        << ", pathogenic " << data.vocabulary.count(FeatureKind::pathogenic) << ", vus "
        << data.vocabulary.count(FeatureKind::vus) << ")\n";
    out << "nodes:               " << g.num_nodes();
    for (const auto& [k, n] : kinds) out << " " << to_string(k) << "=" << n;
    out << "\n";
    out << "edges:               " << g.num_edges() << "\n";
    out << "mean degree:         " << format_fixed(g.num_nodes() ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes()) : 0.0, 2)
        << " (max " << max_degree << ", isolated " << isolated << ")\n";
    out << "laplacian lambda_max: " << format_fixed(lambda.eigenvalue, 6) << (lambda.converged ? "" : " (not converged)")
        << "\n";
    out << "patients per class: ";
    for (std::size_t c = 0; c < kNumCancerTypes; ++c) out << " " << kCancerTypeKeys[c] << "=" << per_class[c];
    out << "\n";
    out << "skipped patients:    " << g.skipped_patients().size() << "\n";
    if (opts.edges_out) {
        std::ostringstream s;
        write_edge_list(s, g);
        write_text(*opts.edges_out, s.str());
    }
    if (opts.nodes_out) {
        std::ostringstream s;
        write_node_manifest(s, g);
        write_text(*opts.nodes_out, s.str());
    }
    return kOk;
}

} // namespace oncograph::cli
