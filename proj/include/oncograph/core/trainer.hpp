#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "oncograph/core/adam.hpp"
#include "oncograph/core/parameters.hpp"
#include "oncograph/core/tape.hpp"

namespace oncograph {

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;

    bool operator==(const EpochStats&) const = default;
};

struct LossAndAccuracy {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct EarlyStoppingResult {
    std::vector<EpochStats> trace;
    std::size_t best_epoch = 0; ///< 1-based; 0 when no epoch ran
};

/// Adam loop with early stopping on validation loss.
///
/// train_step records the training loss on the tape it is given and reports
/// the loss and accuracy of that pass. evaluate scores the current
/// parameters on the validation rows. The parameters with the lowest
/// validation loss (first one on ties) are restored at the end.
inline EarlyStoppingResult train_with_early_stopping(
    ParameterSet& params, const AdamOptions& adam, std::size_t epochs, std::size_t patience,
    const std::function<LossAndAccuracy(Tape&, Var&, std::size_t epoch)>& train_step,
    const std::function<LossAndAccuracy()>& evaluate) {
    EarlyStoppingResult result;
    if (epochs == 0) return result;
    AdamState state(adam);
    auto pointers = params.pointers();
    double best = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_params = params.snapshot();
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        EpochStats s;
        s.epoch = epoch;
        {
            params.zero_grad();
            Tape tape;
            Var loss{};
            const LossAndAccuracy tr = train_step(tape, loss, epoch);
            tape.backward(loss);
            state.step(pointers);
            s.train_loss = tr.loss;
            s.train_accuracy = tr.accuracy;
        }
        const LossAndAccuracy val = evaluate();
        s.val_loss = val.loss;
        s.val_accuracy = val.accuracy;
        result.trace.push_back(s);
        if (val.loss < best) {
            best = val.loss;
            best_params = params.snapshot();
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= patience) {
            break;
        }
    }
    params.restore(best_params);
    return result;
}

/// Fraction of rows whose argmax (lowest index on ties) equals the label.
inline double argmax_accuracy(const Tensor& logits, std::span<const std::size_t> rows, std::span<const int> labels) {
    if (rows.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto row = logits.row(rows[r]);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j] > row[best]) best = j;
        if (static_cast<int>(best) == labels[r]) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(rows.size());
}

} // namespace oncograph
