#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oncograph/core/error.hpp"

namespace oncograph {

/// Counts indexed [true class][predicted class].
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes = 7) : k_(num_classes), m_(num_classes * num_classes, 0) {
        if (num_classes == 0) throw UsageError("confusion matrix needs at least one class");
    }

    std::size_t num_classes() const noexcept { return k_; }
    std::uint64_t operator()(std::size_t t, std::size_t p) const { return m_.at(t * k_ + p); }
    void add(std::size_t t, std::size_t p, std::uint64_t n = 1) { m_.at(t * k_ + p) += n; }

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto v : m_) s += v;
        return s;
    }
    std::uint64_t trace() const {
        std::uint64_t s = 0;
        for (std::size_t c = 0; c < k_; ++c) s += (*this)(c, c);
        return s;
    }
    std::uint64_t row_sum(std::size_t c) const {
        std::uint64_t s = 0;
        for (std::size_t p = 0; p < k_; ++p) s += (*this)(c, p);
        return s;
    }
    std::uint64_t col_sum(std::size_t c) const {
        std::uint64_t s = 0;
        for (std::size_t t = 0; t < k_; ++t) s += (*this)(t, c);
        return s;
    }

    std::uint64_t tp(std::size_t c) const { return (*this)(c, c); }
    std::uint64_t fp(std::size_t c) const { return col_sum(c) - tp(c); }
    std::uint64_t fn(std::size_t c) const { return row_sum(c) - tp(c); }
    std::uint64_t tn(std::size_t c) const { return total() - tp(c) - fp(c) - fn(c); }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t k_;
    std::vector<std::uint64_t> m_;
};

inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t num_classes = 7) {
    if (y_true.size() != y_pred.size()) {
        throw UsageError("confusion: " + std::to_string(y_true.size()) + " labels but " +
                         std::to_string(y_pred.size()) + " predictions");
    }
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= num_classes || static_cast<std::size_t>(p) >= num_classes)
            throw UsageError("confusion: class index outside [0, " + std::to_string(num_classes) + ")");
        cm.add(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
    }
    return cm;
}

enum class Averaging { macro, micro };

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<std::optional<double>> auc; ///< filled by the caller when scores are available

    std::vector<double> per_class_f1() const {
        std::vector<double> out;
        for (const auto& c : per_class) out.push_back(c.f1);
        return out;
    }
};

/// a / b, or 0 when b is 0.
inline double safe_ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline double f1_score(double precision, double recall) {
    return safe_ratio(2.0 * precision * recall, precision + recall);
}

/// accuracy = trace / total; per class precision = TP/(TP+FP), recall = TP/(TP+FN),
/// F1 = 2PR/(P+R), each 0 when its denominator is 0. Macro averages the per-class
/// values over all classes; micro pools the counts first.
inline MetricsReport metrics(const ConfusionMatrix& cm, Averaging averaging = Averaging::macro) {
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw UsageError("metrics of an empty confusion matrix");
    MetricsReport r;
    r.accuracy = static_cast<double>(cm.trace()) / total;
    double tp_sum = 0.0, fp_sum = 0.0, fn_sum = 0.0;
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        const double tp = static_cast<double>(cm.tp(c)), fp = static_cast<double>(cm.fp(c)),
                     fn = static_cast<double>(cm.fn(c));
        ClassMetrics m;
        m.precision = safe_ratio(tp, tp + fp);
        m.recall = safe_ratio(tp, tp + fn);
        m.f1 = f1_score(m.precision, m.recall);
        r.per_class.push_back(m);
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn;
    }
    if (averaging == Averaging::macro) {
        const double k = static_cast<double>(cm.num_classes());
        for (const auto& m : r.per_class) {
            r.precision += m.precision;
            r.recall += m.recall;
            r.f1 += m.f1;
        }
        r.precision /= k;
        r.recall /= k;
        r.f1 /= k;
    } else {
        r.precision = safe_ratio(tp_sum, tp_sum + fp_sum);
        r.recall = safe_ratio(tp_sum, tp_sum + fn_sum);
        r.f1 = f1_score(r.precision, r.recall);
    }
    r.auc.assign(cm.num_classes(), std::nullopt);
    return r;
}

} // namespace oncograph
