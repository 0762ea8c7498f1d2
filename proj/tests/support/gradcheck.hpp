#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "oncograph/core/parameters.hpp"
#include "oncograph/core/tape.hpp"

namespace oncograph::testing {

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// Relative error with a small floor so entries whose gradient is ~0 compare absolutely.
inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

/// Compares tape gradients of loss(tape) against central differences for
/// every scalar of every parameter.
inline GradCheckResult gradient_check(ParameterSet& params, const std::function<Var(Tape&)>& loss, double h = 1e-5) {
    params.zero_grad();
    {
        Tape tape;
        tape.backward(loss(tape));
    }
    auto eval = [&] {
        Tape tape;
        return loss(tape).value().item();
    };
    GradCheckResult r;
    for (auto& [name, t] : params) {
        const std::vector<double> analytic =
            t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end()) : std::vector<double>(t.size(), 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double saved = t[i];
            t[i] = saved + h;
            const double up = eval();
            t[i] = saved - h;
            const double down = eval();
            t[i] = saved;
            const double err = relative_error(analytic[i], (up - down) / (2.0 * h));
            ++r.checked;
            if (err > r.max_relative_error) {
                r.max_relative_error = err;
                r.worst_parameter = name;
                r.worst_index = i;
            }
        }
    }
    return r;
}

} // namespace oncograph::testing
