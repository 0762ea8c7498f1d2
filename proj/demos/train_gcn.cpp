// Train a GCN on a small synthetic cohort and report test metrics.
//
//   train_gcn [seed]

#include <cstdlib>
#include <iostream>

#include "oncograph/oncograph.hpp"

using namespace oncograph;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 42;

    SyntheticSpec spec;
    spec.class_counts = {40, 20, 20, 20, 20, 30, 20};
    spec.seed = seed;
    const Cohort cohort = generate_synthetic_cohort(spec);

    VocabularyOptions vo;
    vo.phenotype_threshold = 8;
    vo.gene_threshold = 4;
    const FeatureVocabulary vocab = build_vocabulary(cohort, vo);
    const FeatureGraph g = build_feature_graph(cohort, vocab);
    std::cout << cohort.size() << " patients, " << vocab.size() << " features, " << g.num_nodes() << " nodes, "
              << g.num_edges() << " edges\n";

    // Split over patients, then map positions to graph nodes.
    const std::vector<int> y = g.patient_labels();
    const SplitMasks split = stratified_split(y, {}, seed);
    auto nodes = [&](const std::vector<std::size_t>& pos) {
        std::vector<std::size_t> out;
        for (std::size_t p : pos) out.push_back(g.patient_nodes()[p]);
        return out;
    };
    const TrainingMasks masks{nodes(split.train), nodes(split.val), nodes(split.test)};

    ModelConfig config = ModelConfig::defaults_for(Operator::gcn);
    config.seed = seed;
    const TrainedModel trained = train_model(g, masks, config);
    std::cout << "best epoch " << trained.best_epoch << " of " << trained.trace.size() << "\n";

    const Prediction pred = predict(trained.model, g, masks.test);
    std::vector<int> truth;
    for (std::size_t p : split.test) truth.push_back(y[p]);
    const ConfusionMatrix cm = confusion(truth, pred.classes);
    const MetricsReport r = metrics(cm);
    std::cout << "test accuracy " << format_fixed(r.accuracy, 3) << ", macro F1 " << format_fixed(r.f1, 3) << "\n\n";

    std::cout << "confusion (rows true, columns predicted)\n";
    for (std::size_t t = 0; t < kNumCancerTypes; ++t) {
        std::cout << "  " << kCancerTypeKeys[t] << std::string(14 - kCancerTypeKeys[t].size(), ' ');
        for (std::size_t p = 0; p < kNumCancerTypes; ++p) std::cout << ' ' << cm(t, p);
        std::cout << '\n';
    }
    return 0;
}
