#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oncograph/baselines/boosting.hpp"
#include "oncograph/baselines/forest.hpp"
#include "oncograph/baselines/mlp.hpp"
#include "oncograph/baselines/naive_bayes.hpp"
#include "oncograph/baselines/tree.hpp"
#include "oncograph/eval/metrics.hpp"
#include "oncograph/eval/roc.hpp"
#include "oncograph/eval/split.hpp"
#include "oncograph/eval/tables.hpp"
#include "oncograph/gnn/train.hpp"
#include "oncograph/graph/feature_graph.hpp"
#include "oncograph/ingest/cohort.hpp"
#include "oncograph/ingest/ingest.hpp"
#include "oncograph/ingest/synthetic.hpp"
#include "oncograph/ingest/vocabulary.hpp"

namespace oncograph {

// ---------------------------------------------------------------------------
// Model registry

enum class ModelKind {
    agnn, chebnet, gcn, gat, gin, graphsage, sgc, tagcn,
    decision_tree, gradient_boosting, mlp, naive_bayes, random_forest
};

inline constexpr std::array<ModelKind, 13> kAllModels = {
    ModelKind::agnn,          ModelKind::chebnet,           ModelKind::gcn, ModelKind::gat,
    ModelKind::gin,           ModelKind::graphsage,         ModelKind::sgc, ModelKind::tagcn,
    ModelKind::decision_tree, ModelKind::gradient_boosting, ModelKind::mlp, ModelKind::naive_bayes,
    ModelKind::random_forest};

inline bool is_gnn(ModelKind k) { return static_cast<int>(k) < 8; }
inline Operator gnn_operator(ModelKind k) { return static_cast<Operator>(static_cast<int>(k)); }

inline std::string_view to_string(ModelKind k) {
    if (is_gnn(k)) return to_string(gnn_operator(k));
    constexpr std::array<std::string_view, 5> keys = {"decision_tree", "gradient_boosting", "mlp", "naive_bayes",
                                                      "random_forest"};
    return keys[static_cast<std::size_t>(k) - 8];
}

inline std::string_view display_name(ModelKind k) {
    if (is_gnn(k)) return display_name(gnn_operator(k));
    constexpr std::array<std::string_view, 5> names = {"Decision Tree", "Gradient Boosting", "Multi-layer Perceptron",
                                                       "Naive Bayes", "Random Forest"};
    return names[static_cast<std::size_t>(k) - 8];
}

inline std::optional<ModelKind> parse_model(std::string_view key) {
    for (ModelKind k : kAllModels)
        if (to_string(k) == key) return k;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Run configuration

enum class InputMode { synthetic, cohort_file, report_dir };

inline std::string_view to_string(InputMode m) {
    switch (m) {
    case InputMode::synthetic: return "synthetic";
    case InputMode::cohort_file: return "cohort";
    case InputMode::report_dir: return "reports";
    }
    return "synthetic";
}

struct RunConfig {
    InputMode input = InputMode::synthetic;
    SyntheticSpec synthetic;
    std::string cohort_path;
    std::string reports_dir;
    std::string phenotypes_path;

    std::vector<ModelKind> models = std::vector<ModelKind>(kAllModels.begin(), kAllModels.end());
    VocabularyOptions vocabulary;
    SplitRatios split;
    std::vector<std::uint64_t> seeds = {42};
    std::string out_dir = "bench-out";
    std::size_t jobs = 1;
    Averaging averaging = Averaging::macro;
    /// Training length of the gradient-trained models (GNNs and MLP).
    std::size_t epochs = 200;
    std::size_t patience = 30;

    void validate() const {
        if (models.empty()) throw ConfigError("select at least one model");
        if (seeds.empty()) throw ConfigError("select at least one seed");
        if (jobs < 1) throw ConfigError("--jobs must be at least 1");
        split.validate();
        if (input == InputMode::synthetic) synthetic.validate();
        if (input == InputMode::cohort_file && cohort_path.empty()) throw ConfigError("cohort path is empty");
        if (input == InputMode::report_dir && (reports_dir.empty() || phenotypes_path.empty()))
            throw ConfigError("report input needs a report directory and a phenotype table");
        for (std::size_t i = 0; i < models.size(); ++i)
            for (std::size_t j = i + 1; j < models.size(); ++j)
                if (models[i] == models[j]) throw ConfigError("model '" + std::string(to_string(models[i])) + "' listed twice");
    }

    /// Everything that can change results; output location and parallelism are excluded.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["input"] = std::string(to_string(input));
        if (input == InputMode::synthetic) j["synthetic"] = synthetic.to_json();
        if (input == InputMode::cohort_file) j["cohort"] = cohort_path;
        if (input == InputMode::report_dir) {
            j["reports"] = reports_dir;
            j["phenotypes"] = phenotypes_path;
        }
        nlohmann::ordered_json models_json = nlohmann::ordered_json::array();
        for (ModelKind k : models) models_json.push_back(std::string(to_string(k)));
        j["models"] = models_json;
        j["pheno_threshold"] = vocabulary.phenotype_threshold;
        j["gene_threshold"] = vocabulary.gene_threshold;
        j["split"] = {split.train, split.val, split.test};
        j["seeds"] = seeds;
        j["averaging"] = averaging == Averaging::macro ? "macro" : "micro";
        j["epochs"] = epochs;
        j["patience"] = patience;
        return j;
    }

    std::string config_hash() const { return hex64(fnv1a(to_json().dump())); }
};

// ---------------------------------------------------------------------------
// Results

struct ModelRun {
    ModelKind model = ModelKind::gcn;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    MetricsReport report;
    std::vector<RocCurve> roc;
    std::vector<int> predictions; ///< test-set predictions, split order
    std::size_t best_epoch = 0;
    double seconds = 0.0;
};

/// Shared, read-only inputs of every model run.
struct PreparedData {
    Cohort cohort;
    FeatureVocabulary vocabulary;
    FeatureGraph graph;
    Tensor patient_features;         ///< multi-hot rows of the patient nodes
    std::vector<int> patient_labels; ///< in graph patient order
    std::vector<std::string> warnings;
};

inline Cohort resolve_cohort(const RunConfig& config, std::vector<std::string>& warnings) {
    switch (config.input) {
    case InputMode::synthetic: return generate_synthetic_cohort(config.synthetic);
    case InputMode::cohort_file: return load_cohort(config.cohort_path);
    case InputMode::report_dir: {
        auto r = ingest_reports(config.reports_dir, config.phenotypes_path);
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
        return std::move(r.cohort);
    }
    }
    throw ConfigError("unknown input mode");
}

inline PreparedData prepare_data(const RunConfig& config) {
    std::vector<std::string> warnings;
    Cohort cohort = resolve_cohort(config, warnings);
    validate_cohort(cohort);
    FeatureVocabulary vocab = build_vocabulary(cohort, config.vocabulary);
    FeatureGraph graph = build_feature_graph(cohort, vocab);
    for (const auto& id : graph.skipped_patients())
        warnings.push_back("patient '" + id + "' has no feature after filtering; excluded");
    if (graph.patient_nodes().empty()) throw DataError("no patient survived feature filtering");
    Tensor x = gather_rows(graph.features(), graph.patient_nodes());
    std::vector<int> y = graph.patient_labels();
    return PreparedData{std::move(cohort), std::move(vocab), std::move(graph), std::move(x), std::move(y),
                        std::move(warnings)};
}

namespace detail {

inline std::vector<int> take(std::span<const int> v, std::span<const std::size_t> idx) {
    std::vector<int> out;
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

inline std::vector<std::size_t> to_nodes(const FeatureGraph& g, std::span<const std::size_t> positions) {
    std::vector<std::size_t> out;
    for (std::size_t p : positions) out.push_back(g.patient_nodes()[p]);
    return out;
}

/// Test-set class probabilities [test x 7] of one model.
inline Tensor run_model(const RunConfig& config, const PreparedData& data, const SplitMasks& split, ModelKind kind,
                        std::uint64_t seed, std::size_t& best_epoch) {
    const std::size_t classes = kNumCancerTypes;
    if (is_gnn(kind)) {
        ModelConfig mc = ModelConfig::defaults_for(gnn_operator(kind));
        mc.seed = seed;
        mc.epochs = config.epochs;
        mc.patience = config.patience;
        TrainingMasks masks{to_nodes(data.graph, split.train), to_nodes(data.graph, split.val),
                            to_nodes(data.graph, split.test)};
        TrainedModel t = train_model(data.graph, masks, mc, classes);
        best_epoch = t.best_epoch;
        return predict(t.model, data.graph, masks.test).probabilities;
    }
    const Tensor& x = data.patient_features;
    const Tensor x_test = gather_rows(x, split.test);
    switch (kind) {
    case ModelKind::decision_tree: {
        const Tensor xt = gather_rows(x, split.train);
        return DecisionTree::fit(xt, take(data.patient_labels, split.train), classes).predict_proba(x_test);
    }
    case ModelKind::random_forest: {
        ForestConfig fc;
        fc.seed = seed;
        const Tensor xt = gather_rows(x, split.train);
        return RandomForest::fit(xt, take(data.patient_labels, split.train), classes, fc).predict_proba(x_test);
    }
    case ModelKind::gradient_boosting: {
        const Tensor xt = gather_rows(x, split.train);
        return GradientBoosting::fit(xt, take(data.patient_labels, split.train), classes).predict_proba(x_test);
    }
    case ModelKind::naive_bayes: {
        const Tensor xt = gather_rows(x, split.train);
        return NaiveBayes::fit(xt, take(data.patient_labels, split.train), classes).predict_proba(x_test);
    }
    case ModelKind::mlp: {
        MlpConfig mc;
        mc.seed = seed;
        mc.epochs = config.epochs;
        mc.patience = config.patience;
        Mlp m = mlp_fit(x, data.patient_labels, split.train, split.val, classes, mc);
        best_epoch = 0;
        for (std::size_t i = 0; i < m.trace().size(); ++i)
            if (best_epoch == 0 || m.trace()[i].val_loss < m.trace()[best_epoch - 1].val_loss) best_epoch = i + 1;
        return m.predict_proba(x_test);
    }
    default: break;
    }
    throw UsageError("unhandled model kind");
}

} // namespace detail

/// Trains and scores one model on one split.
inline ModelRun evaluate_model(const RunConfig& config, const PreparedData& data, const SplitMasks& split,
                               ModelKind kind, std::uint64_t seed) {
    ModelRun run;
    run.model = kind;
    run.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Tensor proba = detail::run_model(config, data, split, kind, seed, run.best_epoch);
        const std::vector<int> y_test = detail::take(data.patient_labels, split.test);
        run.predictions = argmax_rows(proba);
        run.report = metrics(confusion(y_test, run.predictions, kNumCancerTypes), config.averaging);
        for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
            run.roc.push_back(roc_curve(proba, y_test, c));
            run.report.auc[c] = run.roc.back().auc;
        }
        run.ok = true;
    } catch (const std::exception& e) {
        run.ok = false;
        run.error = e.what();
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

/// Runs task(i) for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct BenchResult {
    RunConfig config;
    std::vector<ModelRun> runs; ///< seeds outer, models inner (config order)
    std::vector<SplitMasks> splits;
    std::vector<std::string> warnings;
    std::string tables;
    std::string summary;
    std::string vocabulary_tsv;
    std::size_t num_patients = 0;
    std::size_t num_features = 0;
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0;

    bool all_ok() const {
        for (const auto& r : runs)
            if (!r.ok) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Aggregation

struct MeanStd {
    double mean = 0.0;
    double sd = 0.0; ///< sample standard deviation; 0 for a single value
};

inline MeanStd mean_std(std::span<const double> v) {
    MeanStd r;
    if (v.empty()) return r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

/// Per-model report averaged over the successful seeds of that model.
inline std::optional<MetricsReport> mean_report(const std::vector<ModelRun>& runs, ModelKind kind) {
    MetricsReport m;
    m.per_class.assign(kNumCancerTypes, {});
    std::size_t n = 0;
    for (const auto& r : runs) {
        if (r.model != kind || !r.ok) continue;
        ++n;
        m.accuracy += r.report.accuracy;
        m.precision += r.report.precision;
        m.recall += r.report.recall;
        m.f1 += r.report.f1;
        for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
            m.per_class[c].precision += r.report.per_class[c].precision;
            m.per_class[c].recall += r.report.per_class[c].recall;
            m.per_class[c].f1 += r.report.per_class[c].f1;
        }
    }
    if (n == 0) return std::nullopt;
    const double d = static_cast<double>(n);
    m.accuracy /= d;
    m.precision /= d;
    m.recall /= d;
    m.f1 /= d;
    for (auto& c : m.per_class) {
        c.precision /= d;
        c.recall /= d;
        c.f1 /= d;
    }
    return m;
}

inline std::vector<TableRow> table_rows(const BenchResult& result) {
    std::vector<TableRow> rows;
    for (ModelKind k : result.config.models) {
        auto m = mean_report(result.runs, k);
        if (!m) continue;
        rows.push_back({std::string(display_name(k)), is_gnn(k) ? ModelGroup::gnn : ModelGroup::baseline, *m});
    }
    return rows;
}

/// Group means of each metric over the per-model (seed-averaged) reports,
/// followed by per-model mean and standard deviation when several seeds ran.
inline std::string render_summary(const BenchResult& result) {
    const auto rows = table_rows(result);
    std::ostringstream out;
    std::size_t n_gnn = 0, n_base = 0;
    for (const auto& r : rows) (r.group == ModelGroup::gnn ? n_gnn : n_base) += 1;
    out << "GNN mean vs baseline mean (" << n_gnn << " GNN, " << n_base << " baseline models)\n";
    const std::array<std::pair<const char*, double MetricsReport::*>, 4> metrics_list = {
        std::pair{"Accuracy", &MetricsReport::accuracy}, std::pair{"Precision", &MetricsReport::precision},
        std::pair{"Recall", &MetricsReport::recall}, std::pair{"F1", &MetricsReport::f1}};
    for (const auto& [name, field] : metrics_list) {
        std::vector<double> g, b;
        for (const auto& r : rows) (r.group == ModelGroup::gnn ? g : b).push_back(r.report.*field);
        const std::string gs = g.empty() ? "n/a" : format_fixed(mean_std(g).mean, 3);
        const std::string bs = b.empty() ? "n/a" : format_fixed(mean_std(b).mean, 3);
        char line[128];
        std::snprintf(line, sizeof line, "  %-10s %s vs %s\n", name, gs.c_str(), bs.c_str());
        out << line;
    }
    if (result.config.seeds.size() > 1) {
        out << "\nPer-model mean +/- sd over " << result.config.seeds.size() << " seeds\n";
        for (ModelKind k : result.config.models) {
            std::array<std::vector<double>, 4> vals;
            for (const auto& r : result.runs) {
                if (r.model != k || !r.ok) continue;
                for (std::size_t i = 0; i < 4; ++i) vals[i].push_back(r.report.*metrics_list[i].second);
            }
            out << "  " << display_name(k) << " (" << vals[0].size() << " runs):";
            for (std::size_t i = 0; i < 4; ++i) {
                const MeanStd s = mean_std(vals[i]);
                out << ' ' << metrics_list[i].first << ' ' << format_fixed(s.mean, 3) << "+/-" << format_fixed(s.sd, 3);
            }
            out << '\n';
        }
    }
    std::size_t failed = 0;
    for (const auto& r : result.runs) failed += r.ok ? 0 : 1;
    if (failed > 0) out << "\n" << failed << " model run(s) failed; see results.jsonl\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json run_to_json(const ModelRun& r, const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["model"] = std::string(to_string(r.model));
    j["display_name"] = std::string(display_name(r.model));
    j["group"] = is_gnn(r.model) ? "gnn" : "baseline";
    j["seed"] = r.seed;
    j["config_hash"] = config_hash;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    j["accuracy"] = r.report.accuracy;
    j["precision"] = r.report.precision;
    j["recall"] = r.report.recall;
    j["f1"] = r.report.f1;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    nlohmann::ordered_json auc = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
        per_class[std::string(kCancerTypeKeys[c])] = r.report.per_class[c].f1;
        auc[std::string(kCancerTypeKeys[c])] =
            r.report.auc[c] ? nlohmann::ordered_json(*r.report.auc[c]) : nlohmann::ordered_json();
    }
    j["per_class_f1"] = per_class;
    j["auc"] = auc;
    j["best_epoch"] = r.best_epoch;
    return j;
}

inline std::string results_jsonl(const BenchResult& result) {
    const std::string hash = result.config.config_hash();
    std::string out;
    for (const auto& r : result.runs) out += run_to_json(r, hash).dump() + "\n";
    return out;
}

inline std::string roc_tsv(const ModelRun& r) {
    std::ostringstream out;
    out << "class\tfpr\ttpr\tthreshold\n";
    char buf[128];
    for (const auto& curve : r.roc) {
        for (const auto& p : curve.points) {
            std::snprintf(buf, sizeof buf, "%s\t%.17g\t%.17g\t%.17g\n", std::string(kCancerTypeKeys[curve.cls]).c_str(),
                          p.fpr, p.tpr, p.threshold);
            out << buf;
        }
    }
    return out.str();
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Driver

/// Prepares the data once, splits it once per seed, and trains every
/// selected model on the same split. Failing models are recorded, not thrown.
inline BenchResult run_benchmark(const RunConfig& config) {
    config.validate();
    const PreparedData data = prepare_data(config);
    BenchResult result;
    result.config = config;
    result.warnings = data.warnings;
    result.num_patients = data.patient_labels.size();
    result.num_features = data.vocabulary.size();
    result.num_nodes = data.graph.num_nodes();
    result.num_edges = data.graph.num_edges();
    result.vocabulary_tsv = data.vocabulary.to_tsv();
    for (std::uint64_t seed : config.seeds) {
        result.splits.push_back(stratified_split(data.patient_labels, config.split, seed));
        for (const auto& w : result.splits.back().warnings)
            result.warnings.push_back("seed " + std::to_string(seed) + ": " + w);
    }
    const std::size_t m = config.models.size();
    result.runs.resize(config.seeds.size() * m);
    parallel_for(result.runs.size(), config.jobs, [&](std::size_t i) {
        const std::size_t s = i / m;
        result.runs[i] = evaluate_model(config, data, result.splits[s], config.models[i % m], config.seeds[s]);
    });
    const auto rows = table_rows(result);
    result.tables = rows.empty() ? "no model finished successfully\n" : render_tables(rows);
    result.summary = render_summary(result);
    return result;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

/// Writes results.jsonl, tables.txt, summary.txt, vocabulary.tsv, roc/*.tsv and
/// manifest.json (the only file with timestamps and timings).
inline void write_outputs(const BenchResult& result, std::chrono::system_clock::time_point started,
                          std::chrono::system_clock::time_point finished) {
    namespace fs = std::filesystem;
    const fs::path dir(result.config.out_dir);
    std::error_code ec;
    fs::create_directories(dir / "roc", ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_text(dir / "results.jsonl", results_jsonl(result));
    write_text(dir / "tables.txt", result.tables);
    write_text(dir / "summary.txt", result.summary);
    write_text(dir / "vocabulary.tsv", result.vocabulary_tsv);
    for (const auto& r : result.runs) {
        if (!r.ok) continue;
        write_text(dir / "roc" / (std::string(to_string(r.model)) + "_seed" + std::to_string(r.seed) + ".tsv"),
                   roc_tsv(r));
    }
    nlohmann::ordered_json manifest;
    manifest["config"] = result.config.to_json();
    manifest["config_hash"] = result.config.config_hash();
    manifest["jobs"] = result.config.jobs;
    manifest["started_utc"] = utc_timestamp(started);
    manifest["finished_utc"] = utc_timestamp(finished);
    manifest["wall_seconds"] = std::chrono::duration<double>(finished - started).count();
    manifest["patients"] = result.num_patients;
    manifest["features"] = result.num_features;
    manifest["graph_nodes"] = result.num_nodes;
    manifest["graph_edges"] = result.num_edges;
    nlohmann::ordered_json timings = nlohmann::ordered_json::array();
    for (const auto& r : result.runs) {
        timings.push_back({{"model", std::string(to_string(r.model))}, {"seed", r.seed}, {"seconds", r.seconds}});
    }
    manifest["timings"] = timings;
    manifest["warnings"] = result.warnings;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace oncograph
