#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subseas/models/dshw.hpp"
#include "subseas/models/ets.hpp"
#include "subseas/models/snaive.hpp"
#include "subseas/series.hpp"
#include "subseas/subsample.hpp"

namespace subseas::models {

struct ForecastSettings {
    double level = 0.95;
    int paths = 1000;
    bool dshw_ar = false;
};

/// Everything a forecaster may look at for one (sub)series.
struct SubseriesTask {
    std::span<const double> values;
    int period = 1;
    int horizon = 1;
    /// Original horizon steps covered, one per forecast step.
    std::vector<int> alignment;
    /// Seasonal periods for multi-seasonal families; empty means {period}.
    std::vector<int> periods;
    SeasonWindow window;
};

struct ForecastOutcome {
    ForecastBundle bundle;
    std::optional<ComponentFlags> components;
};

/// Extension point for model families (an ARIMA family would plug in here).
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual ForecastOutcome forecast(const SubseriesTask& task, const ForecastSettings& settings,
                                     std::uint64_t seed) const = 0;
};

class EtsForecaster final : public Forecaster {
public:
    std::string name() const override { return "ets"; }
    ForecastOutcome forecast(const SubseriesTask& task, const ForecastSettings& settings,
                             std::uint64_t seed) const override {
        const auto model = fit_ets_auto(task.values, task.period);
        return {models::forecast(model, task.horizon, settings.level, settings.paths, seed), ets_components(model)};
    }
};

class SeasonalNaiveForecaster final : public Forecaster {
public:
    std::string name() const override { return "snaive"; }
    ForecastOutcome forecast(const SubseriesTask& task, const ForecastSettings& settings,
                             std::uint64_t) const override {
        return {seasonal_naive(task.values, task.period, task.horizon, settings.level), std::nullopt};
    }
};

/// Load-data family: double-seasonal Holt-Winters for two periods, additive
/// Holt-Winters (ETS(A,A,A)) for a single period.
class LoadForecaster final : public Forecaster {
public:
    std::string name() const override { return "dshw"; }
    ForecastOutcome forecast(const SubseriesTask& task, const ForecastSettings& settings,
                             std::uint64_t seed) const override {
        const auto& periods = task.periods;
        if (periods.size() == 2) {
            const auto model = fit_dshw(task.values, {periods[0], periods[1]}, settings.dshw_ar);
            return {models::forecast(model, task.horizon, settings.level, settings.paths, seed), std::nullopt};
        }
        const int period = periods.empty() ? task.period : periods.front();
        const auto model = fit_ets(task.values, {Trend::Additive, Seasonal::Additive, period});
        return {models::forecast(model, task.horizon, settings.level, settings.paths, seed), ets_components(model)};
    }
};

enum class ModelFamily { Ets, SeasonalNaive, Dshw };

inline ModelFamily parse_model_family(const std::string& name) {
    if (name == "ets") return ModelFamily::Ets;
    if (name == "snaive") return ModelFamily::SeasonalNaive;
    if (name == "dshw") return ModelFamily::Dshw;
    throw std::invalid_argument("unknown model family: " + name);
}

inline std::unique_ptr<Forecaster> make_forecaster(ModelFamily family) {
    switch (family) {
        case ModelFamily::Ets: return std::make_unique<EtsForecaster>();
        case ModelFamily::SeasonalNaive: return std::make_unique<SeasonalNaiveForecaster>();
        case ModelFamily::Dshw: return std::make_unique<LoadForecaster>();
    }
    throw std::invalid_argument("unknown model family");
}

}  // namespace subseas::models
