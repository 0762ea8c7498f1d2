#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oncograph/ingest/ingest.hpp"
#include "oncograph/ingest/synthetic.hpp"
#include "oncograph/ingest/vocabulary.hpp"
#include "../support/cohorts.hpp"

using namespace oncograph;
namespace fs = std::filesystem;
using oncograph::testing::blank_cohort;
using oncograph::testing::random_cohort;

namespace {

void with_phenotype_count(Cohort& c, const std::string& term, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) c[i].phenotypes.insert(term);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("oncograph_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST(Report, MinimalFinding) {
    const auto r = parse_report_text("PATIENT ID: A1\nGENOMIC FINDINGS\n  EGFR L858R\n");
    EXPECT_EQ(r.patient_id, "A1");
    EXPECT_EQ(r.pathogenic, (std::set<std::string>{"EGFR"}));
    EXPECT_TRUE(r.vus.empty());
    EXPECT_FALSE(r.cancer_type.has_value());
}

TEST(Report, DuplicatesCollapse) {
    const auto r = parse_report_text(
        "GENOMIC FINDINGS\n  EGFR L858R\n  EGFR T790M\n  KRAS G12C\n"
        "VARIANTS OF UNKNOWN SIGNIFICANCE\n  ATM x\n  ATM y\n  EGFR z\n");
    EXPECT_EQ(r.pathogenic, (std::set<std::string>{"EGFR", "KRAS"}));
    EXPECT_EQ(r.vus, (std::set<std::string>{"ATM", "EGFR"}));
}

TEST(Report, UnknownHeaderIsSkippedWithWarning) {
    const auto r = parse_report_text("GENOMIC FINDINGS\n  TP53 a\nTHERAPY NOTES\n  NOTAGENE b\n");
    EXPECT_EQ(r.pathogenic, (std::set<std::string>{"TP53"}));
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("THERAPY NOTES"), std::string::npos);
}

TEST(Report, MissingSectionsIsAParseError) {
    try {
        parse_report_text("PATIENT ID: A1\nCANCER TYPE: lung\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_report_text("CANCER TYPE: mars\nGENOMIC FINDINGS\n"), ParseError);
}

TEST(Report, CrlfInputParses) {
    const auto r = parse_report_text("PATIENT ID: B2\r\nCANCER TYPE: liver\r\nGENOMIC FINDINGS\r\n  BRCA2 x\r\n");
    EXPECT_EQ(r.patient_id, "B2");
    EXPECT_EQ(r.cancer_type, CancerType::liver);
    EXPECT_EQ(r.pathogenic, (std::set<std::string>{"BRCA2"}));
}

TEST(Report, RenderParseRoundTrip) {
    for (const auto& rec : random_cohort(100, 7)) {
        const auto r = parse_report_text(render_report(rec));
        EXPECT_EQ(r.patient_id, rec.id);
        EXPECT_EQ(r.cancer_type, rec.cancer_type);
        EXPECT_EQ(r.pathogenic, rec.pathogenic);
        EXPECT_EQ(r.vus, rec.vus);
        EXPECT_TRUE(r.warnings.empty());
    }
}

TEST(CohortFile, EmptyAndSingleLine) {
    std::istringstream empty("");
    EXPECT_TRUE(read_cohort(empty).empty());
    std::istringstream one(
        R"({"patient_id":"x","cancer_type":"breast","phenotypes":["HP:1","HP:2"],"pathogenic":["BRCA1"],"vus":[]})"
        "\n");
    const Cohort c = read_cohort(one);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].id, "x");
    EXPECT_EQ(c[0].cancer_type, CancerType::breast);
    EXPECT_EQ(c[0].phenotypes, (std::set<std::string>{"HP:1", "HP:2"}));
    EXPECT_EQ(c[0].pathogenic, (std::set<std::string>{"BRCA1"}));
}

TEST(CohortFile, ErrorsCarryLineNumbers) {
    std::istringstream bad("{\"patient_id\":\"a\",\"cancer_type\":\"lung\"}\n{oops\n");
    try {
        read_cohort(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream unknown("{\"patient_id\":\"a\",\"cancer_type\":\"mars\"}\n");
    EXPECT_THROW(read_cohort(unknown), DataError);
    std::istringstream dup("{\"patient_id\":\"a\",\"cancer_type\":\"lung\"}\n{\"patient_id\":\"a\",\"cancer_type\":\"lung\"}\n");
    EXPECT_THROW(read_cohort(dup), DataError);
    std::istringstream wrong_type("{\"patient_id\":\"a\",\"cancer_type\":\"lung\",\"vus\":[1]}\n");
    EXPECT_THROW(read_cohort(wrong_type), ParseError);
}

TEST(CohortFile, WriteReadRoundTrip) {
    const Cohort c = random_cohort(100, 8);
    std::stringstream s;
    write_cohort(s, c);
    EXPECT_EQ(read_cohort(s), c);
}

TEST(CohortFile, SyntheticDefaultRoundTrip) {
    const Cohort c = generate_synthetic_cohort(SyntheticSpec{});
    std::stringstream s;
    write_cohort(s, c);
    EXPECT_EQ(read_cohort(s), c);
}

TEST(Vocabulary, PhenotypeThresholdIsInclusive) {
    Cohort c = blank_cohort(25);
    with_phenotype_count(c, "nineteen", 19);
    with_phenotype_count(c, "twenty", 20);
    const auto v = build_vocabulary(c);
    EXPECT_FALSE(v.index_of({FeatureKind::phenotype, "nineteen"}));
    EXPECT_TRUE(v.index_of({FeatureKind::phenotype, "twenty"}));
}

TEST(Vocabulary, GeneThresholdIsExclusive) {
    Cohort c = blank_cohort(12);
    for (std::size_t i = 0; i < 10; ++i) c[i].pathogenic.insert("TEN");
    for (std::size_t i = 0; i < 11; ++i) c[i].vus.insert("ELEVEN");
    const auto v = build_vocabulary(c);
    EXPECT_FALSE(v.index_of({FeatureKind::pathogenic, "TEN"}));
    EXPECT_TRUE(v.index_of({FeatureKind::vus, "ELEVEN"}));
}

TEST(Vocabulary, StopTermsAreRemovedCaseInsensitively) {
    const std::vector<std::string> expected = {"cyst", "pain", "carcinoma", "neoplasm", "symptoms", "disease",
                                               "minor (disease)", "sarcoma - category (morphologic abnormality)"};
    EXPECT_EQ(default_stop_terms(), expected);
    Cohort c = blank_cohort(30);
    for (auto& r : c) {
        r.phenotypes = {"PAIN", "Cyst", "carcinoma", "NeoPlasm", "Symptoms", "DISEASE", "Minor (Disease)",
                        "Sarcoma - Category (Morphologic Abnormality)", "fever"};
    }
    const auto v = build_vocabulary(c);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v.keys()[0], (FeatureKey{FeatureKind::phenotype, "fever"}));
}

TEST(Vocabulary, CanonicalOrderAndGeneCategories) {
    Cohort c = blank_cohort(3);
    for (auto& r : c) {
        r.phenotypes = {"b", "a"};
        r.vus = {"ATM"};
        r.pathogenic = {"ATM", "TP53"};
    }
    VocabularyOptions o;
    o.phenotype_threshold = 1;
    o.gene_threshold = 0;
    const auto v = build_vocabulary(c, o);
    const std::vector<FeatureKey> expected = {{FeatureKind::phenotype, "a"},
                                              {FeatureKind::phenotype, "b"},
                                              {FeatureKind::pathogenic, "ATM"},
                                              {FeatureKind::pathogenic, "TP53"},
                                              {FeatureKind::vus, "ATM"}};
    EXPECT_EQ(v.keys(), expected);
    EXPECT_EQ(v.counts(), (std::vector<std::size_t>{3, 3, 3, 3, 3}));
    EXPECT_EQ(v.to_tsv().substr(0, 16), "0\tphenotype\ta\t3\n");
}

TEST(Vocabulary, OrderIndependentAndIdempotent) {
    SyntheticSpec spec;
    spec.class_counts = {30, 20, 20, 20, 20, 20, 20};
    const Cohort c = generate_synthetic_cohort(spec);
    Cohort shuffled = c;
    Rng rng(2);
    rng.shuffle(std::span<PatientRecord>(shuffled));
    const auto a = build_vocabulary(c);
    const auto b = build_vocabulary(shuffled);
    EXPECT_EQ(a.keys(), b.keys());
    EXPECT_EQ(a.counts(), b.counts());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(build_vocabulary(c).keys(), a.keys());
}

TEST(Multihot, MatchesMembershipOracleAndDecodes) {
    SyntheticSpec spec;
    spec.class_counts = {10, 10, 10, 10, 10, 10, 10};
    const Cohort c = generate_synthetic_cohort(spec);
    VocabularyOptions o;
    o.phenotype_threshold = 5;
    o.gene_threshold = 3;
    const auto v = build_vocabulary(c, o);
    const Tensor x = encode_multihot(c, v);
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::vector<FeatureKey> surviving;
        for (std::size_t j = 0; j < v.size(); ++j) {
            const auto& key = v.keys()[j];
            const auto& set = key.kind == FeatureKind::phenotype ? c[i].phenotypes
                              : key.kind == FeatureKind::pathogenic ? c[i].pathogenic
                                                                    : c[i].vus;
            const bool member = set.contains(key.name);
            EXPECT_EQ(x(i, j), member ? 1.0 : 0.0);
            if (member) surviving.push_back(key);
        }
        EXPECT_EQ(decode_multihot_row(x.row(i), v), surviving);
    }
}

TEST(Multihot, ZeroAndFullRows) {
    Cohort c = blank_cohort(2);
    c[0].phenotypes = {"a", "b"};
    c[0].pathogenic = {"G"};
    VocabularyOptions o;
    o.phenotype_threshold = 1;
    o.gene_threshold = 0;
    const auto v = build_vocabulary(c, o);
    const Tensor x = encode_multihot(c, v);
    EXPECT_EQ(x, Tensor::matrix({{1, 1, 1}, {0, 0, 0}}));
}

TEST(Synthetic, DefaultClassCountsAndDeterminism) {
    const SyntheticSpec spec;
    const Cohort c = generate_synthetic_cohort(spec);
    const std::array<std::size_t, kNumCancerTypes> expected = {223, 66, 53, 91, 104, 140, 107};
    std::array<std::size_t, kNumCancerTypes> got{};
    for (const auto& r : c) ++got[static_cast<std::size_t>(r.cancer_type)];
    EXPECT_EQ(got, expected);
    EXPECT_EQ(c.size(), 784u);
    EXPECT_EQ(generate_synthetic_cohort(spec), c);
    SyntheticSpec other = spec;
    other.seed = 43;
    EXPECT_NE(generate_synthetic_cohort(other), c);
    EXPECT_NO_THROW(validate_cohort(c));
}

TEST(Synthetic, DefaultVocabularyUnderDefaultThresholds) {
    const auto v = build_vocabulary(generate_synthetic_cohort(SyntheticSpec{}));
    EXPECT_GE(v.count(FeatureKind::phenotype), 50u);
    EXPECT_GT(v.count(FeatureKind::pathogenic), 0u);
    EXPECT_GT(v.count(FeatureKind::vus), 0u);
}

TEST(Synthetic, GeneFeaturesSplitTwoToOne) {
    std::size_t pathogenic = 0, vus = 0;
    for (std::size_t i = 0; i < 60; ++i) (synthetic_gene_is_pathogenic(i) ? pathogenic : vus)++;
    EXPECT_EQ(pathogenic, 40u);
    EXPECT_EQ(vus, 20u);
}

TEST(Synthetic, SignatureDemandBeyondVocabularyIsAConfigError) {
    SyntheticSpec spec;
    spec.phenotype_vocab = 40;
    spec.gene_vocab = 40;
    spec.signature_features = 12;
    EXPECT_THROW(generate_synthetic_cohort(spec), ConfigError);
    SyntheticSpec zero;
    zero.class_counts[3] = 0;
    EXPECT_THROW(generate_synthetic_cohort(zero), ConfigError);
}

TEST(Synthetic, FullSignatureNoBackgroundIsSeparable) {
    SyntheticSpec spec;
    spec.p_signature = 1.0;
    spec.p_background = 0.0;
    const Cohort c = generate_synthetic_cohort(spec);
    // Every patient carries exactly its class signature, so records of one class are identical.
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (c[i].cancer_type != c[i - 1].cancer_type) continue;
        EXPECT_EQ(c[i].phenotypes, c[i - 1].phenotypes);
        EXPECT_EQ(c[i].pathogenic, c[i - 1].pathogenic);
        EXPECT_EQ(c[i].vus, c[i - 1].vus);
    }
}

TEST(PhenotypeTable, ParsesAndRejects) {
    std::istringstream in("# comment\n\nA\tHP:1\nA\tHP:2\nB\tfever\r\n");
    const auto t = read_phenotype_tsv(in);
    EXPECT_EQ(t.at("A"), (std::set<std::string>{"HP:1", "HP:2"}));
    EXPECT_EQ(t.at("B"), (std::set<std::string>{"fever"}));
    std::istringstream bad("A\tHP:1\nno tab here\n");
    try {
        read_phenotype_tsv(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(IngestReports, ExportThenIngestRoundTrip) {
    TempDir dir("ingest_roundtrip");
    Cohort c = random_cohort(40, 9);
    // Phenotype terms with tabs or edge whitespace cannot travel through the TSV.
    for (auto& r : c) {
        std::set<std::string> kept;
        for (const auto& t : r.phenotypes)
            if (t.find('\t') == std::string::npos && detail::trim(t) == t) kept.insert(t);
        r.phenotypes = kept;
    }
    export_reports(c, dir.path / "reports", dir.path / "phenotypes.tsv");
    IngestResult got = ingest_reports(dir.path / "reports", dir.path / "phenotypes.tsv");
    std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(got.cohort.begin(), got.cohort.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    EXPECT_EQ(got.cohort, c);
}

TEST(IngestReports, AggregatesFailures) {
    TempDir dir("ingest_failures");
    std::ofstream(dir.path / "a.txt") << "PATIENT ID: a\nCANCER TYPE: lung\nGENOMIC FINDINGS\n  EGFR x\n";
    std::ofstream(dir.path / "b.txt") << "PATIENT ID: b\nGENOMIC FINDINGS\n";
    std::ofstream(dir.path / "c.txt") << "nothing useful\n";
    std::ofstream(dir.path / "ph.tsv") << "a\tfever\nghost\tcough\n";
    try {
        ingest_reports(dir.path, dir.path / "ph.tsv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2 report(s) failed"), std::string::npos);
        EXPECT_NE(msg.find("b.txt"), std::string::npos);
        EXPECT_NE(msg.find("c.txt"), std::string::npos);
    }
    fs::remove(dir.path / "b.txt");
    fs::remove(dir.path / "c.txt");
    std::ofstream(dir.path / "d.txt") << "CANCER TYPE: liver\nVARIANTS OF UNKNOWN SIGNIFICANCE\n  ATM y\n";
    const IngestResult r = ingest_reports(dir.path, dir.path / "ph.tsv");
    ASSERT_EQ(r.cohort.size(), 2u);
    EXPECT_EQ(r.cohort[0].phenotypes, (std::set<std::string>{"fever"}));
    EXPECT_EQ(r.cohort[1].id, "d");
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("ghost"), std::string::npos);
}

TEST(IngestReports, EmptyDirectoryIsAParseError) {
    TempDir dir("ingest_empty");
    std::ofstream(dir.path / "ph.tsv") << "";
    EXPECT_THROW(ingest_reports(dir.path, dir.path / "ph.tsv"), ParseError);
    EXPECT_THROW(ingest_reports(dir.path / "missing", dir.path / "ph.tsv"), ParseError);
}
