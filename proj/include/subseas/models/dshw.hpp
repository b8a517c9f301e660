#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subseas/models/ets.hpp"
#include "subseas/models/simulate.hpp"
#include "subseas/optim.hpp"
#include "subseas/series.hpp"

namespace subseas::models {

/// Multiplicative double-seasonal Holt-Winters (level, additive trend, a
/// short-cycle index D and a long-cycle index W), with an optional AR(1)
/// adjustment on the one-step residual.
struct DshwParams {
    double alpha = 0.1;   // level
    double gamma = 0.01;  // trend
    double delta = 0.2;   // short-cycle index
    double omega = 0.2;   // long-cycle index
    double lambda = 0.0;  // AR(1) residual coefficient
};

struct DshwState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> day;
    std::vector<double> week;
    std::size_t t = 0;       // observations absorbed so far
    double residual = 0.0;   // last base-model one-step residual
};

struct DshwModel {
    std::pair<int, int> periods{24, 168};
    bool use_ar = false;
    DshwParams params;
    DshwState initial;
    DshwState final_state;
    double sse = 0.0;
    double sigma2 = 0.0;
    int n = 0;
};

inline double dshw_base(const DshwState& s) {
    return (s.level + s.trend) * s.day[s.t % s.day.size()] * s.week[s.t % s.week.size()];
}

inline double dshw_one_step(const DshwParams& p, const DshwState& s) { return dshw_base(s) + p.lambda * s.residual; }

/// Absorbs y; returns the one-step error including the AR term.
inline double dshw_update(const DshwParams& p, DshwState& s, double y) {
    const std::size_t di = s.t % s.day.size();
    const std::size_t wi = s.t % s.week.size();
    const double d = s.day[di];
    const double w = s.week[wi];
    const double base = (s.level + s.trend) * d * w;
    const double error = y - (base + p.lambda * s.residual);
    const double level = p.alpha * y / (d * w) + (1.0 - p.alpha) * (s.level + s.trend);
    s.trend = p.gamma * (level - s.level) + (1.0 - p.gamma) * s.trend;
    s.level = level;
    s.day[di] = p.delta * y / (level * w) + (1.0 - p.delta) * d;
    s.week[wi] = p.omega * y / (level * d) + (1.0 - p.omega) * w;
    s.residual = y - base;
    ++s.t;
    return error;
}

inline double dshw_sse(const DshwParams& p, const DshwState& initial, std::span<const double> y,
                       DshwState* final_state = nullptr) {
    DshwState s = initial;
    double sse = 0.0;
    for (double v : y) {
        const double e = dshw_update(p, s, v);
        sse += e * e;
    }
    if (final_state) *final_state = std::move(s);
    return sse;
}

/// Starting states from the first two long cycles: level and trend from the
/// two cycle means, long-cycle ratios to that line, split into a short-cycle
/// profile and the residual long-cycle pattern, both normalised to mean 1.
inline DshwState dshw_initial_state(std::span<const double> y, int s1, int s2) {
    const auto p1 = static_cast<std::size_t>(s1);
    const auto p2 = static_cast<std::size_t>(s2);
    const double mean0 = std::accumulate(y.begin(), y.begin() + s2, 0.0) / s2;
    const double mean1 = std::accumulate(y.begin() + s2, y.begin() + 2 * s2, 0.0) / s2;

    DshwState s;
    s.trend = (mean1 - mean0) / s2;
    s.level = mean0 - s.trend * (s2 + 1) / 2.0;

    std::vector<double> ratio(p2, 0.0);
    for (std::size_t i = 0; i < 2 * p2; ++i) {
        ratio[i % p2] += y[i] / (s.level + s.trend * static_cast<double>(i + 1)) / 2.0;
    }
    s.day.assign(p1, 0.0);
    for (std::size_t i = 0; i < p2; ++i) s.day[i % p1] += ratio[i] / static_cast<double>(p2 / p1);
    s.week.resize(p2);
    for (std::size_t i = 0; i < p2; ++i) s.week[i] = ratio[i] / s.day[i % p1];

    const double day_mean = std::accumulate(s.day.begin(), s.day.end(), 0.0) / s1;
    for (double& v : s.day) v /= day_mean;
    const double week_mean = std::accumulate(s.week.begin(), s.week.end(), 0.0) / s2;
    for (double& v : s.week) v /= week_mean;
    // Keep level * D * W unchanged.
    s.level *= day_mean * week_mean;
    s.trend *= day_mean * week_mean;
    return s;
}

namespace detail {

constexpr double kSmoothLo = 1e-4;
constexpr double kSmoothHi = 0.9999;
constexpr double kLambdaMax = 0.99;

inline DshwParams decode_dshw(const std::vector<double>& x, bool use_ar) {
    DshwParams p;
    p.alpha = optim::to_box(x[0], kSmoothLo, kSmoothHi);
    p.gamma = optim::to_box(x[1], kSmoothLo, kSmoothHi);
    p.delta = optim::to_box(x[2], kSmoothLo, kSmoothHi);
    p.omega = optim::to_box(x[3], kSmoothLo, kSmoothHi);
    p.lambda = use_ar ? optim::to_box(x[4], -kLambdaMax, kLambdaMax) : 0.0;
    return p;
}

}  // namespace detail

/// Chooses (alpha, gamma, delta, omega[, lambda]) by one-step SSE with the
/// simplex search; initial states stay at their heuristic values.
inline DshwModel fit_dshw(std::span<const double> y, std::pair<int, int> periods, bool use_ar = false,
                          const optim::NelderMeadOptions& options = {}) {
    const auto [s1, s2] = periods;
    if (s1 < 1 || s2 < 2 || s2 % s1 != 0) throw ModelError("periods must be nested");
    if (y.size() < 2 * static_cast<std::size_t>(s2)) throw ModelError("series shorter than two long cycles");
    for (double v : y) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ModelError("non-positive values");
    }

    DshwModel model;
    model.periods = periods;
    model.use_ar = use_ar;
    model.initial = dshw_initial_state(y, s1, s2);

    const DshwParams start;
    std::vector<double> x0{optim::from_box(start.alpha, detail::kSmoothLo, detail::kSmoothHi),
                           optim::from_box(start.gamma, detail::kSmoothLo, detail::kSmoothHi),
                           optim::from_box(start.delta, detail::kSmoothLo, detail::kSmoothHi),
                           optim::from_box(start.omega, detail::kSmoothLo, detail::kSmoothHi)};
    if (use_ar) x0.push_back(0.0);
    const std::vector<double> steps(x0.size(), 0.5);

    auto objective = [&](const std::vector<double>& x) {
        return dshw_sse(detail::decode_dshw(x, use_ar), model.initial, y);
    };
    const auto result = optim::nelder_mead(objective, x0, steps, options);
    if (!std::isfinite(result.value)) throw ModelError("DSHW estimation failed");

    model.params = detail::decode_dshw(result.x, use_ar);
    model.sse = dshw_sse(model.params, model.initial, y, &model.final_state);
    model.n = static_cast<int>(y.size());
    model.sigma2 = model.sse / model.n;
    return model;
}

/// k-step forecasts (S + kT) * D * W (+ lambda^k * residual). Index vectors
/// tile periodically past one cycle.
inline ForecastBundle forecast(const DshwModel& model, int h, double level, int paths, std::uint64_t seed) {
    check_interval_args(h, level, paths);
    const DshwState& s = model.final_state;
    ForecastBundle out;
    out.level = level;
    out.model_label = "DSHW(" + std::to_string(model.periods.first) + "," + std::to_string(model.periods.second) +
                      (model.use_ar ? ",AR1)" : ")");
    double ar = model.params.lambda * s.residual;
    for (int k = 1; k <= h; ++k) {
        const std::size_t slot = s.t + static_cast<std::size_t>(k - 1);
        const double point = (s.level + k * s.trend) * s.day[slot % s.day.size()] * s.week[slot % s.week.size()];
        out.points.push_back(point + ar);
        ar *= model.params.lambda;
    }
    if (model.sigma2 <= 0.0) {
        out.lower = out.points;
        out.upper = out.points;
        return out;
    }
    simulate_bounds(
        s, [&](const DshwState& st) { return dshw_one_step(model.params, st); },
        [&](DshwState& st, double y) { dshw_update(model.params, st, y); }, h, model.sigma2, level, paths, seed,
        out.lower, out.upper);
    return out;
}

}  // namespace subseas::models
