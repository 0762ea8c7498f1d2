// From report texts and a phenotype table to the feature graph.

#include <iostream>
#include <sstream>

#include "oncograph/oncograph.hpp"

using namespace oncograph;

namespace {

const char* kReports[] = {
    "PATIENT ID: A1\n"
    "CANCER TYPE: breast\n"
    "GENOMIC FINDINGS\n"
    "  BRCA1 c.68_69delAG\n"
    "VARIANTS OF UNKNOWN SIGNIFICANCE\n"
    "  ATM p.R337C\n",

    "PATIENT ID: A2\n"
    "CANCER TYPE: breast\n"
    "GENOMIC FINDINGS\n"
    "  BRCA1 c.68_69delAG\n"
    "VARIANTS OF UNKNOWN SIGNIFICANCE\n",

    "PATIENT ID: A3\n"
    "CANCER TYPE: colon_rectum\n"
    "GENOMIC FINDINGS\n"
    "  MLH1 deletion\n"
    "VARIANTS OF UNKNOWN SIGNIFICANCE\n"
    "  ATM p.R337C\n",
};

const char* kPhenotypes = "A1\tHP:0003002\n"
                          "A1\tpain\n"
                          "A2\tHP:0003002\n"
                          "A3\tHP:0002580\n"
                          "A3\tHP:0003002\n";

} // namespace

int main() {
    std::istringstream tsv(kPhenotypes);
    const auto phenotypes = read_phenotype_tsv(tsv);

    Cohort cohort;
    for (const char* text : kReports) {
        const ParsedReport r = parse_report_text(text);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        PatientRecord rec;
        rec.id = r.patient_id.value();
        rec.cancer_type = r.cancer_type.value();
        rec.pathogenic = r.pathogenic;
        rec.vus = r.vus;
        if (auto it = phenotypes.find(rec.id); it != phenotypes.end()) rec.phenotypes = it->second;
        cohort.push_back(rec);
    }

    // Tiny cohort: keep every term ("pain" is a stop term and still goes).
    VocabularyOptions vo;
    vo.phenotype_threshold = 1;
    vo.gene_threshold = 0;
    const FeatureVocabulary vocab = build_vocabulary(cohort, vo);
    std::cout << "vocabulary\n" << vocab.to_tsv() << "\n";

    const FeatureGraph g = build_feature_graph(cohort, vocab);
    std::cout << "nodes\n";
    write_node_manifest(std::cout, g);
    std::cout << "\nedges\n";
    write_edge_list(std::cout, g);

    std::cout << "\nsym-normalized adjacency, row of " << cohort.front().id << "\n";
    const SparseMatrix a = normalize_adjacency(g).matrix;
    const std::size_t row = g.patient_nodes().front();
    for (std::size_t k = a.row_begin(row); k < a.row_end(row); ++k)
        std::cout << "  -> " << a.indices()[k] << "  " << format_fixed(a.values()[k], 4) << "\n";
    return 0;
}
