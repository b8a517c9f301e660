#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subseas/combine.hpp"
#include "subseas/harness/experiment.hpp"
#include "subseas/harness/parallel.hpp"
#include "subseas/harness/report.hpp"
#include "subseas/metrics.hpp"
#include "subseas/models/forecaster.hpp"
#include "subseas/subsample.hpp"

namespace subseas::harness {

struct LoadConfig {
    int train = 1344;
    int horizon = 24;
    int step = 24;
    std::vector<Method> methods{Method::Standard, Method::Multiple};
    CombineMode combine = CombineMode::FlatPooled;
    double level = 0.95;
    int paths = 100;
    std::uint64_t seed = 42;
    bool use_ar = false;
    int workers = 1;

    void validate(const MultiSeasonalSeries& series) const {
        if (auto errors = validate_series(series); !errors.empty()) throw std::invalid_argument(errors.front());
        if (horizon < 1 || horizon > series.short_period()) {
            throw std::invalid_argument("horizon must lie in [1, short period]");
        }
        if (step < 1) throw std::invalid_argument("step must be >= 1");
        if (train < 2 * series.long_period()) throw std::invalid_argument("train must cover two long cycles");
        if (static_cast<long>(series.values.size()) < static_cast<long>(train) + horizon) {
            throw std::invalid_argument("series shorter than train + horizon");
        }
        if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("PI level must lie in (0, 1)");
        if (paths < 1) throw std::invalid_argument("paths must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    }
};

struct OriginResult {
    int origin = 0;  // training length at this origin
    bool skipped = false;
    std::string reason;
    std::map<Method, std::vector<double>> scaled_errors;  // |error| / scale per step
    std::map<Method, std::vector<double>> points;
    int windows_skipped = 0;
};

struct LoadResult {
    LoadConfig config;
    std::pair<int, int> periods;
    std::vector<OriginResult> origins;
    std::map<Method, std::vector<std::optional<double>>> mase_curve;  // per horizon step

    int used_origins() const {
        return static_cast<int>(std::count_if(origins.begin(), origins.end(), [](const OriginResult& o) { return !o.skipped; }));
    }
};

/// Origins at train, train + step, ... while a full horizon of test data remains.
inline std::vector<int> rolling_origins(std::size_t length, int train, int horizon, int step) {
    std::vector<int> out;
    for (long o = train; o + horizon <= static_cast<long>(length); o += step) out.push_back(static_cast<int>(o));
    return out;
}

namespace detail {

inline std::vector<double> load_standard(const MultiSeasonalSeries& train, int h, const models::Forecaster& forecaster,
                                         const models::ForecastSettings& settings, std::uint64_t seed,
                                         const std::string& key) {
    models::SubseriesTask task;
    task.values = train.values;
    task.period = train.short_period();
    task.horizon = h;
    for (int t = 1; t <= h; ++t) task.alignment.push_back(t);
    task.periods = {train.short_period(), train.long_period()};
    task.window = SeasonWindow{1, train.short_period(), train.short_period()};
    const auto s = window_seed(seed, key, 1, train.short_period());
    return forecaster.forecast(task, settings, s).bundle.points;
}

inline std::vector<double> load_multiple(const MultiSeasonalSeries& train, int h, const models::Forecaster& forecaster,
                                         const models::ForecastSettings& settings, CombineMode mode,
                                         std::uint64_t seed, const std::string& key, int& skipped) {
    const auto daily = daily_view(train);
    std::vector<WeightedBundle> bundles;
    for (const auto& lw : enumerate_load_plan(train, h)) {
        const auto& w = lw.window;
        try {
            const auto sub = extract(daily, w, h);
            if (!w.is_original() && sub.sub_values.size() < min_subseries_length(w.width)) {
                ++skipped;
                continue;
            }
            models::SubseriesTask task;
            task.values = sub.sub_values;
            task.period = sub.sub_frequency;
            task.horizon = sub.sub_horizon;
            task.alignment = sub.alignment;
            task.periods = lw.periods;
            task.window = w;
            auto outcome = forecaster.forecast(task, settings, window_seed(seed, key, w.start_season, w.width));
            outcome.bundle.alignment = sub.alignment;
            bundles.push_back({std::move(outcome.bundle), w, lw.multiplicity});
        } catch (const std::exception&) {
            if (w.is_original()) throw;
            ++skipped;
        }
    }
    return combine(bundles, h, mode).points;
}

}  // namespace detail

/// Rolling-origin evaluation with an expanding training window. MASE at each
/// origin is scaled by the in-sample mean absolute difference at the long
/// seasonal lag; the curve averages over origins that were not skipped.
inline LoadResult run_rolling_load(const MultiSeasonalSeries& series, const LoadConfig& config,
                                   const models::Forecaster& forecaster) {
    config.validate(series);
    LoadResult result;
    result.config = config;
    result.periods = series.periods;
    const auto origins = rolling_origins(series.values.size(), config.train, config.horizon, config.step);
    result.origins.resize(origins.size());
    const models::ForecastSettings settings{config.level, config.paths, config.use_ar};
    const int h = config.horizon;

    parallel_for(origins.size(), config.workers, [&](std::size_t k) {
        OriginResult& res = result.origins[k];
        res.origin = origins[k];
        const auto o = static_cast<std::size_t>(origins[k]);
        const auto begin = series.values.begin();
        const std::vector<double> test(begin + static_cast<std::ptrdiff_t>(o), begin + static_cast<std::ptrdiff_t>(o) + h);
        MultiSeasonalSeries train = series;
        train.values.assign(begin, begin + static_cast<std::ptrdiff_t>(o));

        const bool positive = std::all_of(train.values.begin(), train.values.end(), [](double v) { return v > 0.0; }) &&
                              std::all_of(test.begin(), test.end(), [](double v) { return v > 0.0; });
        if (!positive) {
            res.skipped = true;
            res.reason = "non-positive demand";
            return;
        }
        try {
            const double scale = metrics::seasonal_scale(train.values, series.long_period());
            if (!(scale > 0.0)) throw metrics::MetricError("zero scaled denominator");
            const std::string key = series.id + "@" + std::to_string(o);
            for (Method m : config.methods) {
                auto points = m == Method::Standard
                                  ? detail::load_standard(train, h, forecaster, settings, config.seed, key)
                                  : detail::load_multiple(train, h, forecaster, settings, config.combine, config.seed,
                                                          key, res.windows_skipped);
                std::vector<double> scaled(static_cast<std::size_t>(h));
                for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = std::abs(test[i] - points[i]) / scale;
                res.scaled_errors[m] = std::move(scaled);
                res.points[m] = std::move(points);
            }
        } catch (const std::exception& e) {
            res.skipped = true;
            res.reason = e.what();
            res.scaled_errors.clear();
            res.points.clear();
        }
    });

    for (Method m : config.methods) {
        std::vector<std::optional<double>> curve;
        for (int t = 0; t < h; ++t) {
            double sum = 0.0;
            int n = 0;
            for (const auto& o : result.origins) {
                if (o.skipped) continue;
                sum += o.scaled_errors.at(m)[static_cast<std::size_t>(t)];
                ++n;
            }
            curve.push_back(n > 0 ? std::optional<double>(sum / n) : std::nullopt);
        }
        result.mase_curve[m] = std::move(curve);
    }
    return result;
}

inline std::vector<std::filesystem::path> emit_load_reports(const LoadResult& result, const std::filesystem::path& outdir,
                                                            const std::string& source) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;

    auto curve = [&](Method m) {
        auto it = result.mase_curve.find(m);
        return it == result.mase_curve.end() ? std::vector<std::optional<double>>{} : it->second;
    };
    write_file(outdir / "plot_data.csv",
               plot_data_csv(curve(Method::Standard), curve(Method::Multiple), result.config.horizon));
    written.push_back(outdir / "plot_data.csv");

    std::ostringstream os;
    os << "origin,status,mase_standard,mase_multiple,windows_skipped\n";
    for (const auto& o : result.origins) {
        auto mean_of = [&](Method m) -> std::optional<double> {
            auto it = o.scaled_errors.find(m);
            if (it == o.scaled_errors.end()) return std::nullopt;
            double s = 0.0;
            for (double v : it->second) s += v;
            return s / static_cast<double>(it->second.size());
        };
        os << o.origin << "," << (o.skipped ? csv_field("skipped: " + o.reason) : "ok") << ","
           << format_number(mean_of(Method::Standard)) << "," << format_number(mean_of(Method::Multiple)) << ","
           << o.windows_skipped << "\n";
    }
    write_file(outdir / "origins.csv", os.str());
    written.push_back(outdir / "origins.csv");

    const auto& c = result.config;
    nlohmann::ordered_json meta;
    meta["tool"] = "subseas";
    meta["version"] = kVersion;
    std::vector<std::string> methods;
    for (Method m : c.methods) methods.push_back(to_string(m));
    meta["config"] = {{"csv", source},
                      {"periods", {result.periods.first, result.periods.second}},
                      {"train", c.train},
                      {"horizon", c.horizon},
                      {"step", c.step},
                      {"methods", methods},
                      {"combine", to_string(c.combine)},
                      {"pi", c.level},
                      {"paths", c.paths},
                      {"seed", c.seed},
                      {"ar", c.use_ar},
                      {"mase_scale_lag", result.periods.second},
                      {"window", "expanding"}};
    meta["counts"] = {{"origins", result.origins.size()}, {"origins_used", result.used_origins()}};
    write_file(outdir / "metadata.json", meta.dump(2) + "\n");
    written.push_back(outdir / "metadata.json");
    return written;
}

}  // namespace subseas::harness
