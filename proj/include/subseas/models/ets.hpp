#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subseas/models/simulate.hpp"
#include "subseas/optim.hpp"
#include "subseas/series.hpp"

namespace subseas::models {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Trend { None, Additive, AdditiveDamped };
enum class Seasonal { None, Additive, Multiplicative };

/// Additive-error exponential smoothing form.
struct ModelSpec {
    Trend trend = Trend::None;
    Seasonal seasonal = Seasonal::None;
    int period = 1;

    bool has_trend() const { return trend != Trend::None; }
    bool has_seasonal() const { return seasonal != Seasonal::None; }
    bool damped() const { return trend == Trend::AdditiveDamped; }

    std::string label() const {
        const char* t = trend == Trend::None ? "N" : trend == Trend::Additive ? "A" : "Ad";
        const char* s = seasonal == Seasonal::None ? "N" : seasonal == Seasonal::Additive ? "A" : "M";
        return std::string("ETS(A,") + t + "," + s + ")";
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct EtsParams {
    double alpha = 0.1;
    double beta = 0.0;
    double gamma = 0.0;
    double phi = 1.0;
};

/// season[head] is the index applying to the next observation.
struct EtsState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> season;
    std::size_t head = 0;
};

struct FittedModel {
    ModelSpec spec;
    EtsParams params;
    EtsState initial;
    EtsState final_state;
    double sse = 0.0;
    double sigma2 = 0.0;
    int n = 0;
    int n_params = 0;
    double aic = 0.0;
    double aicc = 0.0;
};

struct ComponentFlags {
    bool has_trend = false;
    bool has_seasonal = false;
};

inline ComponentFlags ets_components(const FittedModel& model) {
    return {model.spec.has_trend(), model.spec.has_seasonal()};
}

namespace detail {

constexpr double kAlphaLo = 1e-4;
constexpr double kAlphaHi = 0.9999;
constexpr double kPhiLo = 0.8;
constexpr double kPhiHi = 0.98;

}  // namespace detail

inline double ets_one_step(const ModelSpec& spec, const EtsParams& p, const EtsState& s) {
    const double base = s.level + (spec.has_trend() ? p.phi * s.trend : 0.0);
    switch (spec.seasonal) {
        case Seasonal::None: return base;
        case Seasonal::Additive: return base + s.season[s.head];
        case Seasonal::Multiplicative: return base * s.season[s.head];
    }
    return base;
}

/// Absorbs observation y into the state; returns the one-step error.
inline double ets_update(const ModelSpec& spec, const EtsParams& p, EtsState& s, double y) {
    const double damped_trend = spec.has_trend() ? p.phi * s.trend : 0.0;
    const double base = s.level + damped_trend;
    double error = 0.0;
    switch (spec.seasonal) {
        case Seasonal::None: {
            error = y - base;
            s.level = base + p.alpha * error;
            if (spec.has_trend()) s.trend = damped_trend + p.beta * error;
            break;
        }
        case Seasonal::Additive: {
            double& idx = s.season[s.head];
            error = y - (base + idx);
            s.level = base + p.alpha * error;
            if (spec.has_trend()) s.trend = damped_trend + p.beta * error;
            idx += p.gamma * error;
            break;
        }
        case Seasonal::Multiplicative: {
            double& idx = s.season[s.head];
            error = y - base * idx;
            s.level = base + p.alpha * error / idx;
            if (spec.has_trend()) s.trend = damped_trend + p.beta * error / idx;
            idx += p.gamma * error / base;
            break;
        }
    }
    if (!s.season.empty()) s.head = (s.head + 1) % s.season.size();
    return error;
}

/// One-step in-sample SSE; leaves the post-sample state in `final_state`
/// and the errors in `residuals` when given.
inline double ets_sse(const ModelSpec& spec, const EtsParams& p, const EtsState& initial, std::span<const double> y,
                      EtsState* final_state = nullptr, std::vector<double>* residuals = nullptr) {
    EtsState s = initial;
    double sse = 0.0;
    if (residuals) residuals->clear();
    for (double v : y) {
        const double e = ets_update(spec, p, s, v);
        sse += e * e;
        if (residuals) residuals->push_back(e);
    }
    if (final_state) *final_state = std::move(s);
    return sse;
}

inline int ets_param_count(const ModelSpec& spec) {
    int k = 1 + 1;  // alpha, l0
    if (spec.has_trend()) k += 2;  // beta, b0
    if (spec.damped()) k += 1;
    if (spec.has_seasonal()) k += 1 + (spec.period - 1);  // gamma, free seasonal states
    return k;
}

/// Heuristic starting states. Seasonal forms use a fixed-effects regression
/// y_t = a_j + b*t on the first few complete cycles (exact for noiseless
/// trend-plus-cycle data); non-seasonal forms use a line through the first
/// ten points.
inline EtsState heuristic_initial_state(const ModelSpec& spec, std::span<const double> y) {
    EtsState state;
    const std::size_t n = y.size();
    if (!spec.has_seasonal()) {
        const std::size_t k = std::min<std::size_t>(n, 10);
        if (spec.has_trend() && k >= 2) {
            double tbar = 0.0, ybar = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                tbar += static_cast<double>(i + 1);
                ybar += y[i];
            }
            tbar /= static_cast<double>(k);
            ybar /= static_cast<double>(k);
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double dt = static_cast<double>(i + 1) - tbar;
                sxy += dt * (y[i] - ybar);
                sxx += dt * dt;
            }
            state.trend = sxy / sxx;
            state.level = ybar - state.trend * tbar;
        } else {
            state.level = y[0];
        }
        return state;
    }

    const auto p = static_cast<std::size_t>(spec.period);
    const std::size_t cycles = std::min<std::size_t>(n / p, 3);
    const std::size_t len = cycles * p;
    std::vector<double> tbar(p, 0.0), ybar(p, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        tbar[i % p] += static_cast<double>(i + 1);
        ybar[i % p] += y[i];
    }
    for (std::size_t j = 0; j < p; ++j) {
        tbar[j] /= static_cast<double>(cycles);
        ybar[j] /= static_cast<double>(cycles);
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double dt = static_cast<double>(i + 1) - tbar[i % p];
        sxy += dt * (y[i] - ybar[i % p]);
        sxx += dt * dt;
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    std::vector<double> intercept(p);
    for (std::size_t j = 0; j < p; ++j) intercept[j] = ybar[j] - slope * tbar[j];
    const double base = std::accumulate(intercept.begin(), intercept.end(), 0.0) / static_cast<double>(p);

    if (spec.has_trend()) {
        state.level = base;
        state.trend = slope;
    } else {
        // Level of the first cycle.
        state.level = base + slope * (static_cast<double>(p) + 1.0) / 2.0;
    }

    state.season.assign(p, 0.0);
    if (spec.seasonal == Seasonal::Additive) {
        for (std::size_t j = 0; j < p; ++j) state.season[j] = intercept[j] - base;
        return state;
    }

    bool line_positive = true;
    for (std::size_t i = 0; i < len; ++i) {
        if (base + slope * static_cast<double>(i + 1) <= 0.0) line_positive = false;
    }
    for (std::size_t i = 0; i < len; ++i) {
        double reference;
        if (line_positive) {
            reference = base + slope * static_cast<double>(i + 1);
        } else {
            const std::size_t c0 = (i / p) * p;
            reference = std::accumulate(y.begin() + static_cast<std::ptrdiff_t>(c0),
                                        y.begin() + static_cast<std::ptrdiff_t>(c0 + p), 0.0) /
                        static_cast<double>(p);
        }
        state.season[i % p] += y[i] / reference / static_cast<double>(cycles);
    }
    const double mean = std::accumulate(state.season.begin(), state.season.end(), 0.0) / static_cast<double>(p);
    for (double& s : state.season) s /= mean;
    if (!line_positive) state.level = ybar[0] / state.season[0];
    return state;
}

namespace detail {

/// Parameter vector layout:
/// [alpha, beta?, gamma?, phi?, l0, b0?, s_1 .. s_{p-1}?] with the smoothing
/// parameters in logistic coordinates and the last seasonal state implied by
/// the normalisation (sum 0 or mean 1).
struct EtsCodec {
    ModelSpec spec;

    std::size_t size() const {
        std::size_t n = 2;
        if (spec.has_trend()) n += 2;
        if (spec.damped()) n += 1;
        if (spec.has_seasonal()) n += 1 + static_cast<std::size_t>(spec.period - 1);
        return n;
    }

    bool decode(const std::vector<double>& x, EtsParams& p, EtsState& s) const {
        std::size_t i = 0;
        p.alpha = optim::to_box(x[i++], kAlphaLo, kAlphaHi);
        p.beta = spec.has_trend() ? p.alpha * optim::logistic(x[i++]) : 0.0;
        p.gamma = spec.has_seasonal() ? (1.0 - p.alpha) * optim::logistic(x[i++]) : 0.0;
        p.phi = spec.damped() ? optim::to_box(x[i++], kPhiLo, kPhiHi) : 1.0;
        s.level = x[i++];
        s.trend = spec.has_trend() ? x[i++] : 0.0;
        s.head = 0;
        if (spec.has_seasonal()) {
            const auto period = static_cast<std::size_t>(spec.period);
            s.season.resize(period);
            double sum = 0.0;
            for (std::size_t j = 0; j + 1 < period; ++j) {
                s.season[j] = x[i++];
                sum += s.season[j];
            }
            if (spec.seasonal == Seasonal::Additive) {
                s.season[period - 1] = -sum;
            } else {
                s.season[period - 1] = static_cast<double>(period) - sum;
                for (double v : s.season) {
                    if (!(v > 0.0)) return false;
                }
            }
        } else {
            s.season.clear();
        }
        return true;
    }

    std::vector<double> encode(const EtsParams& p, const EtsState& s) const {
        std::vector<double> x;
        x.reserve(size());
        x.push_back(optim::from_box(p.alpha, kAlphaLo, kAlphaHi));
        if (spec.has_trend()) x.push_back(optim::logit(p.beta / p.alpha));
        if (spec.has_seasonal()) x.push_back(optim::logit(p.gamma / (1.0 - p.alpha)));
        if (spec.damped()) x.push_back(optim::from_box(p.phi, kPhiLo, kPhiHi));
        x.push_back(s.level);
        if (spec.has_trend()) x.push_back(s.trend);
        if (spec.has_seasonal()) {
            for (std::size_t j = 0; j + 1 < s.season.size(); ++j) x.push_back(s.season[j]);
        }
        return x;
    }

    std::vector<double> steps(double scale) const {
        std::vector<double> st;
        st.reserve(size());
        st.push_back(0.5);
        if (spec.has_trend()) st.push_back(0.5);
        if (spec.has_seasonal()) st.push_back(0.5);
        if (spec.damped()) st.push_back(0.5);
        st.push_back(0.1 * scale);
        if (spec.has_trend()) st.push_back(0.01 * scale);
        if (spec.has_seasonal()) {
            const double s = spec.seasonal == Seasonal::Additive ? 0.1 * scale : 0.05;
            for (int j = 0; j + 1 < spec.period; ++j) st.push_back(s);
        }
        return st;
    }
};

inline double value_scale(std::span<const double> y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(y.size()));
    double max_abs = 0.0;
    for (double v : y) max_abs = std::max(max_abs, std::abs(v));
    return std::max({sd, 1e-6 * max_abs, 1e-12});
}

/// Smallest variance treated as distinguishable from a perfect fit.
inline double variance_floor(std::span<const double> y) {
    double max_abs = 1.0;
    for (double v : y) max_abs = std::max(max_abs, std::abs(v));
    const double tiny = 1e-12 * max_abs;
    return tiny * tiny;
}

inline void finish_fit(FittedModel& model, std::span<const double> y) {
    model.n = static_cast<int>(y.size());
    model.n_params = ets_param_count(model.spec);
    const double n = model.n;
    const double k = model.n_params;
    model.sigma2 = model.sse / n;
    const double mse = std::max(model.sse / n, variance_floor(y));
    model.aic = n * std::log(mse) + 2.0 * k;
    model.aicc = model.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

}  // namespace detail

/// True when the form can be estimated from y at all.
inline bool ets_admissible(const ModelSpec& spec, std::span<const double> y) {
    const auto n = static_cast<long>(y.size());
    if (spec.has_seasonal()) {
        if (spec.period < 2 || n < 2L * spec.period) return false;
        if (spec.seasonal == Seasonal::Multiplicative) {
            for (double v : y) {
                if (!(v > 0.0)) return false;
            }
        }
    }
    return n - ets_param_count(spec) - 1 > 0;
}

/// Minimises one-step SSE over smoothing parameters and initial states for
/// one fixed form, starting from alpha=0.1, beta=0.01, gamma=0.01, phi=0.95.
inline FittedModel fit_ets(std::span<const double> y, const ModelSpec& spec,
                           const optim::NelderMeadOptions& options = {}) {
    if (y.size() < 4) throw ModelError("insufficient data");
    if (!ets_admissible(spec, y)) throw ModelError("model form " + spec.label() + " not admissible for this data");

    detail::EtsCodec codec{spec};
    EtsParams start_params{0.1, 0.01, 0.01, 0.95};
    const EtsState start_state = heuristic_initial_state(spec, y);
    const auto x0 = codec.encode(start_params, start_state);

    EtsParams p;
    EtsState s;
    auto objective = [&](const std::vector<double>& x) {
        if (!codec.decode(x, p, s)) return std::numeric_limits<double>::infinity();
        return ets_sse(spec, p, s, y);
    };
    const auto result = optim::nelder_mead(objective, x0, codec.steps(detail::value_scale(y)), options);

    FittedModel model;
    model.spec = spec;
    if (!std::isfinite(result.value) || !codec.decode(result.x, model.params, model.initial)) {
        throw ModelError("estimation failed for " + spec.label());
    }
    model.sse = ets_sse(spec, model.params, model.initial, y, &model.final_state);
    detail::finish_fit(model, y);
    return model;
}

/// Candidate forms in tie-break order: trend N, A, Ad outer; seasonal N, A, M inner.
inline std::vector<ModelSpec> ets_candidates(int period) {
    std::vector<ModelSpec> out;
    for (Trend t : {Trend::None, Trend::Additive, Trend::AdditiveDamped}) {
        for (Seasonal s : {Seasonal::None, Seasonal::Additive, Seasonal::Multiplicative}) {
            if (s != Seasonal::None && period < 2) continue;
            out.push_back({t, s, s == Seasonal::None ? 1 : period});
        }
    }
    return out;
}

/// Fits every admissible additive-error form and keeps the smallest AICc.
inline FittedModel fit_ets_auto(std::span<const double> y, int period, const optim::NelderMeadOptions& options = {}) {
    if (period < 1) throw ModelError("period must be >= 1");
    if (y.size() < 4) throw ModelError("insufficient data");
    for (double v : y) {
        if (!std::isfinite(v)) throw ModelError("non-finite observation");
    }

    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
        FittedModel model;
        model.spec = {Trend::None, Seasonal::None, 1};
        model.params = {detail::kAlphaLo, 0.0, 0.0, 1.0};
        model.initial.level = y[0];
        model.sse = ets_sse(model.spec, model.params, model.initial, y, &model.final_state);
        detail::finish_fit(model, y);
        return model;
    }

    std::optional<FittedModel> best;
    for (const auto& spec : ets_candidates(period)) {
        if (!ets_admissible(spec, y)) continue;
        FittedModel candidate;
        try {
            candidate = fit_ets(y, spec, options);
        } catch (const ModelError&) {
            continue;
        }
        if (!std::isfinite(candidate.aicc)) continue;
        if (!best || candidate.aicc < best->aicc ||
            (candidate.aicc == best->aicc && candidate.n_params < best->n_params)) {
            best = std::move(candidate);
        }
    }
    if (!best) throw ModelError("no admissible model form");
    return *best;
}

/// Mean path from the zero-innovation recursion; intervals from seeded
/// Gaussian sample paths.
inline ForecastBundle forecast(const FittedModel& model, int h, double level, int paths, std::uint64_t seed) {
    check_interval_args(h, level, paths);
    ForecastBundle out;
    out.level = level;
    out.model_label = model.spec.label();
    out.points.reserve(static_cast<std::size_t>(h));
    EtsState s = model.final_state;
    for (int i = 0; i < h; ++i) {
        const double mu = ets_one_step(model.spec, model.params, s);
        out.points.push_back(mu);
        ets_update(model.spec, model.params, s, mu);
    }
    if (model.sigma2 <= 0.0) {
        out.lower = out.points;
        out.upper = out.points;
        return out;
    }
    simulate_bounds(
        model.final_state, [&](const EtsState& st) { return ets_one_step(model.spec, model.params, st); },
        [&](EtsState& st, double y) { ets_update(model.spec, model.params, st, y); }, h, model.sigma2, level, paths,
        seed, out.lower, out.upper);
    return out;
}

}  // namespace subseas::models
