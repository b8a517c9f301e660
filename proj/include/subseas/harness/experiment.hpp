#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subseas/combine.hpp"
#include "subseas/harness/dataset.hpp"
#include "subseas/harness/parallel.hpp"
#include "subseas/metrics.hpp"
#include "subseas/models/forecaster.hpp"
#include "subseas/subsample.hpp"

namespace subseas::harness {

enum class Method { Standard, Multiple };

inline std::string to_string(Method m) { return m == Method::Standard ? "standard" : "multiple"; }

struct ExperimentConfig {
    std::filesystem::path data;
    std::vector<Method> methods{Method::Standard, Method::Multiple};
    models::ModelFamily model = models::ModelFamily::Ets;
    CombineMode combine = CombineMode::FlatPooled;
    double level = 0.95;
    int paths = 1000;
    std::uint64_t seed = 42;
    std::filesystem::path out;
    std::optional<std::string> category;
    std::vector<std::string> ids;
    int workers = 1;
    bool verbose = false;
    metrics::Loss dm_loss = metrics::Loss::Absolute;

    models::ForecastSettings settings() const { return {level, paths, false}; }

    void validate() const {
        if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("PI level must lie in (0, 1)");
        if (paths < 1) throw std::invalid_argument("paths must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
        if (methods.empty()) throw std::invalid_argument("at least one method required");
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-window stream seed from (master seed, series id, window). Windows get
/// independent streams, so adding or dropping one never moves another.
inline std::uint64_t window_seed(std::uint64_t master, const std::string& id, int start, int width) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = splitmix64(master ^ splitmix64(h));
    s = splitmix64(s ^ static_cast<std::uint64_t>(start));
    return splitmix64(s ^ (static_cast<std::uint64_t>(width) << 32));
}

/// Metric values per reporting bucket; nullopt where undefined.
struct BucketMetrics {
    std::vector<std::optional<double>> mase;
    std::vector<std::optional<double>> amse;
    std::vector<std::optional<double>> msis;
};

struct EvaluationRow {
    BucketMetrics metrics;
    std::vector<double> errors;                        // test - point, per step
    std::vector<std::optional<double>> scaled_errors;  // |error| / scale, per step
    bool scale_ok = false;
};

inline EvaluationRow evaluate(const SeriesRecord& rec, const std::vector<double>& points,
                              const std::vector<double>& lower, const std::vector<double>& upper, double level,
                              const std::vector<metrics::HorizonRange>& buckets) {
    EvaluationRow row;
    metrics::MetricInput in{rec.series.values, rec.test, points, lower, upper, rec.series.frequency, 1.0 - level};
    double scale = 0.0;
    try {
        scale = metrics::seasonal_scale(rec.series.values, rec.series.frequency);
    } catch (const metrics::MetricError&) {
        scale = 0.0;
    }
    row.scale_ok = scale > 0.0;
    for (std::size_t i = 0; i < rec.test.size(); ++i) {
        const double e = rec.test[i] - points[i];
        row.errors.push_back(e);
        row.scaled_errors.push_back(row.scale_ok ? std::optional<double>(std::abs(e) / scale) : std::nullopt);
    }
    auto safe = [](auto&& fn) -> std::optional<double> {
        try {
            return fn();
        } catch (const metrics::MetricError&) {
            return std::nullopt;
        }
    };
    for (const auto& b : buckets) {
        if (b.last > rec.horizon) {
            row.metrics.mase.emplace_back();
            row.metrics.amse.emplace_back();
            row.metrics.msis.emplace_back();
            continue;
        }
        row.metrics.mase.push_back(safe([&] { return metrics::mase(in, b); }));
        row.metrics.amse.push_back(safe([&] { return metrics::amse(in, b); }));
        row.metrics.msis.push_back(safe([&] { return metrics::msis(in, b); }));
    }
    return row;
}

/// Forecast of one method for one series, with bookkeeping.
struct MethodRun {
    std::vector<double> points;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> instance_counts;
    std::string model_label;
    std::optional<models::ComponentFlags> components;
    std::vector<std::string> warnings;
    int windows_used = 0;
    int windows_skipped = 0;
    std::vector<LevelRow> levels;
    EvaluationRow row;
};

struct StandardRun {
    ForecastBundle bundle;
    MethodRun run;
};

struct MultipleRun {
    CombinedForecast combined;
    MethodRun run;
};

inline models::SubseriesTask full_task(const SeriesRecord& rec) {
    models::SubseriesTask task;
    task.values = rec.series.values;
    task.period = rec.series.frequency;
    task.horizon = rec.horizon;
    for (int t = 1; t <= rec.horizon; ++t) task.alignment.push_back(t);
    task.window = SeasonWindow{1, rec.series.frequency, rec.series.frequency};
    return task;
}

/// Fits the configured family on the original series only.
inline StandardRun run_standard(const SeriesRecord& rec, const models::Forecaster& forecaster,
                                const ExperimentConfig& config,
                                const std::vector<metrics::HorizonRange>& buckets) {
    const auto task = full_task(rec);
    const auto seed = window_seed(config.seed, rec.series.id, task.window.start_season, task.window.width);
    auto outcome = forecaster.forecast(task, config.settings(), seed);
    outcome.bundle.alignment = task.alignment;
    check_bundle(outcome.bundle);

    StandardRun out;
    out.run.points = outcome.bundle.points;
    out.run.lower = outcome.bundle.lower;
    out.run.upper = outcome.bundle.upper;
    out.run.instance_counts.assign(static_cast<std::size_t>(rec.horizon), 1);
    out.run.model_label = outcome.bundle.model_label;
    out.run.components = outcome.components;
    out.run.windows_used = 1;
    out.run.row = evaluate(rec, out.run.points, out.run.lower, out.run.upper, config.level, buckets);
    out.bundle = std::move(outcome.bundle);
    return out;
}

/// Forecasts every planned window and pools them. Windows that are too short
/// or fail to fit are skipped; a failure on the original series propagates.
inline MultipleRun run_multiple(const SeriesRecord& rec, const models::Forecaster& forecaster,
                                const ExperimentConfig& config,
                                const std::vector<metrics::HorizonRange>& buckets) {
    const auto plan = enumerate_plan(rec.series, rec.horizon);
    MultipleRun out;
    std::vector<WeightedBundle> bundles;
    bundles.reserve(plan.windows.size());

    for (const auto& pw : plan.windows) {
        const auto& w = pw.window;
        AlignedSubseries sub;
        try {
            sub = extract(rec.series, w, rec.horizon);
        } catch (const std::invalid_argument& e) {
            if (w.is_original()) throw;
            out.run.warnings.push_back(rec.series.id + ": skipped window " + w.label() + ": " + e.what());
            ++out.run.windows_skipped;
            continue;
        }
        if (!w.is_original() && sub.sub_values.size() < min_subseries_length(w.width)) {
            out.run.warnings.push_back(rec.series.id + ": skipped window " + w.label() + ": " +
                                       std::to_string(sub.sub_values.size()) + " observations");
            ++out.run.windows_skipped;
            continue;
        }
        models::SubseriesTask task;
        task.values = sub.sub_values;
        task.period = sub.sub_frequency;
        task.horizon = sub.sub_horizon;
        task.alignment = sub.alignment;
        task.window = w;
        const auto seed = window_seed(config.seed, rec.series.id, w.start_season, w.width);
        models::ForecastOutcome outcome;
        try {
            outcome = forecaster.forecast(task, config.settings(), seed);
        } catch (const std::exception& e) {
            if (w.is_original()) throw;
            out.run.warnings.push_back(rec.series.id + ": skipped window " + w.label() + ": " + e.what());
            ++out.run.windows_skipped;
            continue;
        }
        outcome.bundle.alignment = sub.alignment;
        if (w.is_original()) {
            out.run.model_label = outcome.bundle.model_label;
            out.run.components = outcome.components;
        }
        bundles.push_back({std::move(outcome.bundle), w, pw.multiplicity});
        ++out.run.windows_used;
    }

    out.combined = combine(bundles, rec.horizon, config.combine);
    if (config.verbose) out.run.levels = combine_levels_report(bundles, rec.horizon);
    out.run.points = out.combined.points;
    out.run.lower = out.combined.lower;
    out.run.upper = out.combined.upper;
    out.run.instance_counts = out.combined.instance_counts;
    out.run.row = evaluate(rec, out.run.points, out.run.lower, out.run.upper, config.level, buckets);
    return out;
}

/// One series' outcome across the configured methods.
struct SeriesResult {
    std::string id;
    std::string category;
    int horizon = 0;
    std::map<Method, MethodRun> runs;
    bool failed = false;
    std::string failure;
    std::vector<std::string> warnings;

    /// "(N,N)", "(T,N)", "(N,S)", "(T,S)" from the standard fit, or "NA".
    std::string classification() const {
        auto it = runs.find(Method::Standard);
        if (it == runs.end() || !it->second.components) return "NA";
        const auto& c = *it->second.components;
        return std::string("(") + (c.has_trend ? "T" : "N") + "," + (c.has_seasonal ? "S" : "N") + ")";
    }
};

inline SeriesResult run_series(const SeriesRecord& rec, const models::Forecaster& forecaster,
                               const ExperimentConfig& config, const std::vector<metrics::HorizonRange>& buckets) {
    SeriesResult res;
    res.id = rec.series.id;
    res.category = rec.series.category.value_or("");
    res.horizon = rec.horizon;
    try {
        for (Method m : config.methods) {
            if (m == Method::Standard) {
                res.runs[m] = run_standard(rec, forecaster, config, buckets).run;
            } else {
                auto mr = run_multiple(rec, forecaster, config, buckets);
                res.warnings.insert(res.warnings.end(), mr.run.warnings.begin(), mr.run.warnings.end());
                res.runs[m] = std::move(mr.run);
            }
        }
    } catch (const std::exception& e) {
        res.failed = true;
        res.failure = e.what();
        res.runs.clear();
    }
    return res;
}

struct AggregateCell {
    double mean = 0.0;
    int n = 0;
};

struct DmBucketSummary {
    metrics::HorizonRange bucket;
    int tests = 0;
    int better = 0;   // multiple significantly better
    int worse = 0;    // multiple significantly worse
    int no_decision = 0;

    double pct(int k) const { return tests > 0 ? 100.0 * k / tests : 0.0; }
};

struct EvaluationReport {
    ExperimentConfig config;
    metrics::FrequencyClass frequency_class = metrics::FrequencyClass::Quarterly;
    std::vector<metrics::HorizonRange> buckets;
    std::vector<SeriesResult> series;  // sorted by id
    int ingest_skipped = 0;
    std::vector<std::string> ingest_warnings;
};

inline std::vector<std::optional<double>> const& metric_column(const BucketMetrics& m, const std::string& name) {
    if (name == "MASE") return m.mase;
    if (name == "AMSE") return m.amse;
    if (name == "MSIS") return m.msis;
    throw std::invalid_argument("unknown metric " + name);
}

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"MASE", "AMSE", "MSIS"};
    return names;
}

/// Mean per bucket over the given series; undefined cells are excluded.
template <class Filter>
std::vector<AggregateCell> aggregate(const EvaluationReport& report, Method method, const std::string& metric,
                                     Filter&& include) {
    std::vector<AggregateCell> cells(report.buckets.size());
    std::vector<std::vector<double>> values(report.buckets.size());
    for (const auto& s : report.series) {
        if (s.failed || !include(s)) continue;
        auto it = s.runs.find(method);
        if (it == s.runs.end()) continue;
        const auto& col = metric_column(it->second.row.metrics, metric);
        for (std::size_t b = 0; b < col.size(); ++b) {
            if (col[b]) values[b].push_back(*col[b]);
        }
    }
    for (std::size_t b = 0; b < cells.size(); ++b) {
        double sum = 0.0;
        for (double v : values[b]) sum += v;
        cells[b].n = static_cast<int>(values[b].size());
        cells[b].mean = cells[b].n > 0 ? sum / cells[b].n : 0.0;
    }
    return cells;
}

inline std::vector<AggregateCell> aggregate(const EvaluationReport& report, Method method, const std::string& metric) {
    return aggregate(report, method, metric, [](const SeriesResult&) { return true; });
}

/// Per-series DM tests of standard (first) against multiple (second) on the
/// error subsequence of each bucket longer than one step.
inline std::vector<DmBucketSummary> dm_summary(const EvaluationReport& report) {
    std::vector<DmBucketSummary> out;
    for (const auto& b : report.buckets) {
        if (b.length() < 2) continue;
        DmBucketSummary sum{b};
        for (const auto& s : report.series) {
            if (s.failed || s.horizon < b.last) continue;
            auto st = s.runs.find(Method::Standard);
            auto mu = s.runs.find(Method::Multiple);
            if (st == s.runs.end() || mu == s.runs.end()) continue;
            const auto first = static_cast<std::size_t>(b.first - 1);
            const auto len = static_cast<std::size_t>(b.length());
            std::span<const double> ea(st->second.row.errors.data() + first, len);
            std::span<const double> eb(mu->second.row.errors.data() + first, len);
            const auto r = metrics::dm_test(ea, eb, 1, report.config.dm_loss);
            ++sum.tests;
            switch (r.verdict) {
                case metrics::DmVerdict::SecondBetter: ++sum.better; break;
                case metrics::DmVerdict::FirstBetter: ++sum.worse; break;
                case metrics::DmVerdict::NoDecision: ++sum.no_decision; break;
                case metrics::DmVerdict::NotSignificant: break;
            }
        }
        out.push_back(sum);
    }
    return out;
}

struct ClassSlice {
    std::string label;
    int count = 0;
};

/// Partition of the evaluated series by the components of their standard fit.
inline std::vector<ClassSlice> classify_and_slice(const EvaluationReport& report) {
    std::vector<ClassSlice> out{{"(N,N)", 0}, {"(T,N)", 0}, {"(N,S)", 0}, {"(T,S)", 0}};
    for (const auto& s : report.series) {
        if (s.failed) continue;
        const auto label = s.classification();
        for (auto& c : out) {
            if (c.label == label) ++c.count;
        }
    }
    return out;
}

inline bool classification_available(const EvaluationReport& report) {
    return std::any_of(report.series.begin(), report.series.end(),
                       [](const SeriesResult& s) { return !s.failed && s.classification() != "NA"; });
}

/// Applies the category and id filters, runs all series (in parallel when
/// configured) and assembles the report in id order.
inline EvaluationReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                       const models::Forecaster& forecaster) {
    config.validate();
    EvaluationReport report;
    report.config = config;
    report.frequency_class = dataset.frequency_class;
    report.buckets = metrics::horizon_buckets(dataset.frequency_class);
    report.ingest_skipped = dataset.skipped;
    report.ingest_warnings = dataset.warnings;

    std::vector<const SeriesRecord*> selected;
    for (const auto& rec : dataset.records) {
        if (config.category && rec.series.category.value_or("") != *config.category) continue;
        if (!config.ids.empty() && std::find(config.ids.begin(), config.ids.end(), rec.series.id) == config.ids.end()) {
            continue;
        }
        selected.push_back(&rec);
    }

    report.series.resize(selected.size());
    parallel_for(selected.size(), config.workers, [&](std::size_t i) {
        report.series[i] = run_series(*selected[i], forecaster, config, report.buckets);
    });
    std::stable_sort(report.series.begin(), report.series.end(),
                     [](const SeriesResult& a, const SeriesResult& b) { return a.id < b.id; });
    return report;
}

}  // namespace subseas::harness
