// oncograph: generate, ingest, bench, inspect-graph.
//
// Exit codes: 0 success, 1 some model runs failed, 2 configuration error,
// 3 input parse error. --config reads a TOML/INI file; flags given on the
// command line override its values.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oncograph/cli/commands.hpp"

namespace {

using namespace oncograph;

struct InputFlags {
    std::string cohort;
    std::string reports;
    std::string phenotypes;
    std::uint64_t cohort_seed = 42;
    std::size_t pheno_threshold = 20;
    std::size_t gene_threshold = 10;

    void add(CLI::App* app) {
        app->add_option("--cohort", cohort, "Cohort file (JSON lines); default is the synthetic cohort");
        app->add_option("--reports", reports, "Directory of report texts (*.txt)");
        app->add_option("--phenotypes", phenotypes, "Phenotype table: patient_id<TAB>term");
        app->add_option("--cohort-seed", cohort_seed, "Seed of the synthetic cohort")->capture_default_str();
        app->add_option("--pheno-threshold", pheno_threshold, "Keep phenotypes seen in at least this many patients")
            ->capture_default_str();
        app->add_option("--gene-threshold", gene_threshold, "Keep genes seen in more than this many patients")
            ->capture_default_str();
    }

    void apply(RunConfig& c) const {
        if (!cohort.empty() && !reports.empty()) throw ConfigError("--cohort and --reports are mutually exclusive");
        if (!reports.empty()) {
            c.input = InputMode::report_dir;
            c.reports_dir = reports;
            c.phenotypes_path = phenotypes;
        } else if (!cohort.empty()) {
            c.input = InputMode::cohort_file;
            c.cohort_path = cohort;
        } else {
            c.input = InputMode::synthetic;
            c.synthetic.seed = cohort_seed;
        }
        c.vocabulary.phenotype_threshold = pheno_threshold;
        c.vocabulary.gene_threshold = gene_threshold;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phenotype/genotype feature-graph benchmark: 8 GNN operators against 5 classical baselines"};
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic cohort");
    cli::GenerateOptions gen_opts;
    std::vector<std::string> counts;
    std::string emit_reports;
    gen->add_option("--out,-o", gen_opts.out, "Cohort file to write")->capture_default_str();
    gen->add_option("--seed", gen_opts.spec.seed, "Generator seed")->capture_default_str();
    gen->add_option("--count", counts, "Override a class size, e.g. --count lung=5 (repeatable)");
    gen->add_option("--signature-features", gen_opts.spec.signature_features, "Signature features per class")
        ->capture_default_str();
    gen->add_option("--p-signature", gen_opts.spec.p_signature, "Probability of carrying an own-class signature feature")
        ->capture_default_str();
    gen->add_option("--p-background", gen_opts.spec.p_background, "Probability of carrying any other feature")
        ->capture_default_str();
    gen->add_option("--phenotype-vocab", gen_opts.spec.phenotype_vocab, "Synthetic phenotype terms")->capture_default_str();
    gen->add_option("--gene-vocab", gen_opts.spec.gene_vocab, "Synthetic genes")->capture_default_str();
    gen->add_option("--emit-reports", emit_reports, "Also write report texts and phenotypes.tsv to this directory");

    // ingest
    auto* ing = app.add_subcommand("ingest", "Build a cohort file from report texts and a phenotype table");
    cli::IngestOptions ing_opts;
    ing->add_option("--reports", ing_opts.reports_dir, "Directory of report texts (*.txt)")->required();
    ing->add_option("--phenotypes", ing_opts.phenotypes, "Phenotype table: patient_id<TAB>term")->required();
    ing->add_option("--out,-o", ing_opts.out, "Cohort file to write")->capture_default_str();
    ing->add_option("--vocab-out", ing_opts.vocabulary_out, "Vocabulary export (default <out>.vocab.tsv)");
    ing->add_option("--pheno-threshold", ing_opts.vocabulary.phenotype_threshold,
                    "Keep phenotypes seen in at least this many patients")
        ->capture_default_str();
    ing->add_option("--gene-threshold", ing_opts.vocabulary.gene_threshold,
                    "Keep genes seen in more than this many patients")
        ->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Train and evaluate the selected models");
    InputFlags bench_input;
    bench_input.add(bench);
    std::string models = "all", split = "0.7,0.1,0.2", seeds, averaging = "macro";
    std::uint64_t seed = 42;
    RunConfig run;
    bench->add_option("--models", models, "Comma-separated model keys, or all / gnn / baselines")->capture_default_str();
    bench->add_option("--seed", seed, "Split and training seed")->capture_default_str();
    bench->add_option("--seeds", seeds, "Comma-separated seed sweep; overrides --seed");
    bench->add_option("--split", split, "Train,validation,test ratios")->capture_default_str();
    bench->add_option("--out,-o", run.out_dir, "Output directory")->capture_default_str();
    bench->add_option("--jobs,-j", run.jobs, "Parallel model runs")->capture_default_str();
    bench->add_option("--epochs", run.epochs, "Epochs of the gradient-trained models")->capture_default_str();
    bench->add_option("--patience", run.patience, "Early-stopping patience")->capture_default_str();
    bench->add_option("--averaging", averaging, "macro or micro")->capture_default_str();

    // inspect-graph
    auto* inspect = app.add_subcommand("inspect-graph", "Print feature-graph statistics");
    InputFlags inspect_input;
    inspect_input.add(inspect);
    std::string edges_out, nodes_out;
    inspect->add_option("--edges", edges_out, "Write the edge list (src<TAB>dst)");
    inspect->add_option("--nodes", nodes_out, "Write the node manifest (id<TAB>kind<TAB>name)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kConfigError;
    }

    try {
        if (*gen) {
            cli::apply_counts(gen_opts.spec, counts);
            if (!emit_reports.empty()) gen_opts.reports_dir = emit_reports;
            return cli::cmd_generate(gen_opts, std::cerr);
        }
        if (*ing) return cli::cmd_ingest(ing_opts, std::cerr);
        if (*bench) {
            bench_input.apply(run);
            run.models = cli::parse_models(models);
            run.split = cli::parse_split(split);
            run.seeds = seeds.empty() ? std::vector<std::uint64_t>{seed} : cli::parse_seeds(seeds);
            if (averaging != "macro" && averaging != "micro") throw ConfigError("--averaging must be macro or micro");
            run.averaging = averaging == "macro" ? Averaging::macro : Averaging::micro;
            return cli::cmd_bench(run, std::cout, std::cerr);
        }
        if (*inspect) {
            cli::InspectOptions opts;
            inspect_input.apply(opts.input);
            if (!edges_out.empty()) opts.edges_out = edges_out;
            if (!nodes_out.empty()) opts.nodes_out = nodes_out;
            return cli::cmd_inspect_graph(opts, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
    return cli::kConfigError;
}
