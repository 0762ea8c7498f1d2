#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/eval/metrics.hpp"
#include "oncograph/ingest/cohort.hpp"

namespace oncograph {

enum class ModelGroup { gnn, baseline };

struct TableRow {
    std::string model;
    ModelGroup group = ModelGroup::gnn;
    MetricsReport report;
};

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Flags, per row, whether the row holds the maximum of its group for the
/// column. Values are compared after rounding to the printed precision, so
/// printed ties are all marked.
inline std::vector<bool> column_maxima(const std::vector<TableRow>& rows,
                                       const std::function<double(const MetricsReport&)>& column, int decimals) {
    std::vector<bool> marked(rows.size(), false);
    for (ModelGroup g : {ModelGroup::gnn, ModelGroup::baseline}) {
        double best = -1.0;
        bool any = false;
        for (const auto& r : rows) {
            if (r.group != g) continue;
            best = std::max(best, std::stod(format_fixed(column(r.report), decimals)));
            any = true;
        }
        if (!any) continue;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].group == g && std::stod(format_fixed(column(rows[i].report), decimals)) == best) marked[i] = true;
    }
    return marked;
}

namespace detail {

struct Column {
    std::string header;
    std::function<double(const MetricsReport&)> value;
};

inline std::string render_table(const std::string& title, const std::vector<TableRow>& input,
                                const std::vector<Column>& columns, int decimals) {
    if (input.empty()) throw UsageError("no reports to tabulate");
    // GNN rows first, then baselines; input order is kept within a group.
    std::vector<TableRow> rows;
    for (ModelGroup g : {ModelGroup::gnn, ModelGroup::baseline})
        for (const auto& r : input)
            if (r.group == g) rows.push_back(r);

    std::size_t name_width = 5;
    for (const auto& r : rows) name_width = std::max(name_width, r.model.size());
    std::vector<std::size_t> widths;
    for (const auto& c : columns) widths.push_back(std::max<std::size_t>(c.header.size(), decimals + 3));

    std::vector<std::vector<bool>> marks;
    for (const auto& c : columns) marks.push_back(column_maxima(rows, c.value, decimals));

    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::string header = pad("Model", name_width);
    for (std::size_t j = 0; j < columns.size(); ++j) header += "  " + pad(columns[j].header, widths[j]);
    while (!header.empty() && header.back() == ' ') header.pop_back();
    const std::string rule(header.size(), '-');

    std::string out = title + "\n" + header + "\n" + rule + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].group != rows[i - 1].group) out += rule + "\n";
        std::string line = pad(rows[i].model, name_width);
        for (std::size_t j = 0; j < columns.size(); ++j) {
            std::string cell = format_fixed(columns[j].value(rows[i].report), decimals) + (marks[j][i] ? "*" : "");
            line += "  " + pad(cell, widths[j]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    out += rule + "\n";
    return out;
}

} // namespace detail

/// Model | Accuracy | Precision | Recall | F1, three decimals; '*' marks group maxima.
inline std::string render_metrics_table(const std::vector<TableRow>& rows) {
    return detail::render_table("Overall metrics", rows,
                                {{"Accuracy", [](const MetricsReport& r) { return r.accuracy; }},
                                 {"Precision", [](const MetricsReport& r) { return r.precision; }},
                                 {"Recall", [](const MetricsReport& r) { return r.recall; }},
                                 {"F1", [](const MetricsReport& r) { return r.f1; }}},
                                3);
}

/// Model | per-class F1 for the seven cancer types, two decimals; '*' marks group maxima.
inline std::string render_class_f1_table(const std::vector<TableRow>& rows) {
    std::vector<detail::Column> cols;
    for (std::size_t c = 0; c < kNumCancerTypes; ++c) {
        cols.push_back({std::string(kCancerTypeLabels[c]), [c](const MetricsReport& r) {
                            return c < r.per_class.size() ? r.per_class[c].f1 : 0.0;
                        }});
    }
    return detail::render_table("Per-class F1", rows, cols, 2);
}

inline std::string render_tables(const std::vector<TableRow>& rows) {
    return render_metrics_table(rows) + "\n" + render_class_f1_table(rows);
}

} // namespace oncograph
