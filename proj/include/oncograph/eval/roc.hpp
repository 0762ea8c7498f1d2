#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0; ///< score cut; the first point uses +inf
};

struct RocCurve {
    std::size_t cls = 0;
    std::vector<RocPoint> points;
    std::optional<double> auc; ///< empty when the class or its complement is absent
};

inline void check_probability_rows(const Tensor& scores, double tolerance = 1e-9) {
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        double s = 0.0;
        for (double v : scores.row(i)) s += v;
        if (std::abs(s - 1.0) > tolerance) throw DataError("score row " + std::to_string(i) + " does not sum to 1");
    }
}

/// One-vs-rest ROC for class c over probability columns [m x K].
///
/// Thresholds sweep the distinct scores of column c in descending order; a
/// sample is positive when its score is >= the threshold. The curve starts at
/// (0, 0) and ends at (1, 1); AUC is the trapezoid area.
inline RocCurve roc_curve(const Tensor& scores, std::span<const int> y_true, std::size_t c) {
    if (scores.rows() != y_true.size()) throw DimensionError("roc_curve: score rows differ from label count");
    if (c >= scores.cols()) throw DimensionError("roc_curve: class column out of range");
    check_probability_rows(scores);
    RocCurve curve;
    curve.cls = c;
    double pos = 0.0, neg = 0.0;
    for (int y : y_true) (y == static_cast<int>(c) ? pos : neg) += 1.0;

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores(a, c) > scores(b, c); });

    curve.points.push_back({0.0, 0.0, INFINITY});
    double tp = 0.0, fp = 0.0;
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores(order[k], c);
        for (; k < order.size() && scores(order[k], c) == s; ++k) (y_true[order[k]] == static_cast<int>(c) ? tp : fp) += 1.0;
        curve.points.push_back({neg > 0.0 ? fp / neg : 0.0, pos > 0.0 ? tp / pos : 0.0, s});
    }
    if (curve.points.back().fpr != 1.0 || curve.points.back().tpr != 1.0) curve.points.push_back({1.0, 1.0, -INFINITY});
    if (pos > 0.0 && neg > 0.0) {
        double area = 0.0;
        for (std::size_t k = 1; k < curve.points.size(); ++k) {
            const auto& a = curve.points[k - 1];
            const auto& b = curve.points[k];
            area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
        }
        curve.auc = area;
    }
    return curve;
}

} // namespace oncograph
