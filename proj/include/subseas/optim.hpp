#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace subseas::optim {

struct NelderMeadOptions {
    int max_evaluations = 2000;
    /// Stop when f(worst) - f(best) <= reltol * (|f(best)| + reltol).
    double reltol = 1e-8;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimiser with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). Deterministic:
/// the initial simplex offsets coordinate i of `start` by `steps[i]`.
/// Non-finite objective values are treated as +inf.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::vector<double> start, const std::vector<double>& steps,
                             const NelderMeadOptions& options = {}) {
    const std::size_t n = start.size();
    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    if (n == 0) {
        result.x = std::move(start);
        result.value = eval(result.x);
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += steps[i] != 0.0 ? steps[i] : 0.1;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Stable ordering keeps ties resolved by vertex index.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        const double spread = values[worst] - values[best];
        if (std::isfinite(values[worst]) && spread <= options.reltol * (std::abs(values[best]) + options.reltol)) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t d = 0; d < n; ++d) trial[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
        const double f_reflect = eval(trial);

        if (f_reflect < values[best]) {
            for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }

        const bool outside = f_reflect < values[worst];
        for (std::size_t d = 0; d < n; ++d) {
            trial2[d] = outside ? centroid[d] + 0.5 * (trial[d] - centroid[d])
                                : centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]);
        }
        const double f_contract = eval(trial2);
        if (f_contract < std::min(f_reflect, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d) {
                simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
            }
            values[i] = eval(simplex[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (values[i] < values[best]) best = i;
    }
    result.x = simplex[best];
    result.value = values[best];
    return result;
}

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Maps an unbounded coordinate onto the open interval (lo, hi).
inline double to_box(double u, double lo, double hi) { return lo + (hi - lo) * logistic(u); }

inline double from_box(double v, double lo, double hi) { return logit((v - lo) / (hi - lo)); }

}  // namespace subseas::optim
