#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace subseas::models {

/// Linear interpolation between order statistics (R's type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of empty sample");
    }
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline void check_interval_args(int h, double level, int paths) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("interval level must lie in (0, 1)");
    if (paths < 1) throw std::invalid_argument("simulation paths must be >= 1");
}

/// Simulates `paths` future sample paths of length h by feeding
/// y = predict(state) + N(0, sigma2) back through `advance`, and returns the
/// empirical (1-level)/2 and (1+level)/2 quantiles per step.
///
/// Predict: double(const State&); Advance: void(State&, double y).
template <class State, class Predict, class Advance>
void simulate_bounds(const State& start, Predict&& predict, Advance&& advance, int h, double sigma2, double level,
                     int paths, std::uint64_t seed, std::vector<double>& lower, std::vector<double>& upper) {
    check_interval_args(h, level, paths);
    const auto steps = static_cast<std::size_t>(h);
    const auto n_paths = static_cast<std::size_t>(paths);
    std::vector<double> draws(steps * n_paths);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(std::max(sigma2, 0.0));

    for (std::size_t p = 0; p < n_paths; ++p) {
        State state = start;
        for (std::size_t i = 0; i < steps; ++i) {
            const double y = predict(state) + sigma * normal(rng);
            draws[i * n_paths + p] = y;
            advance(state, y);
        }
    }

    const double tail = (1.0 - level) / 2.0;
    lower.assign(steps, 0.0);
    upper.assign(steps, 0.0);
    for (std::size_t i = 0; i < steps; ++i) {
        std::span<double> column(draws.data() + i * n_paths, n_paths);
        std::sort(column.begin(), column.end());
        lower[i] = quantile_sorted(column, tail);
        upper[i] = quantile_sorted(column, 1.0 - tail);
    }
}

}  // namespace subseas::models
