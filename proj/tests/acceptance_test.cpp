// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "subseas/subseas.hpp"

using namespace subseas;
using namespace subseas::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("subseas_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Windows of width k < m touching any of the first min(h, m) seasons, plus
// the original; found by trying every (start, width).
long brute_force_count(int m, int h) {
    std::set<int> needed;
    for (int t = 0; t < h; ++t) needed.insert(t % m + 1);
    long count = 1;
    for (int width = 1; width < m; ++width) {
        for (int start = 1; start <= m; ++start) {
            bool touches = false;
            for (int j = 0; j < width; ++j) touches = touches || needed.count((start - 1 + j) % m + 1) > 0;
            count += touches;
        }
    }
    return count;
}

SeasonalSeries plain_series(int m, int length, int phase) {
    SeasonalSeries s;
    s.frequency = m;
    s.start_phase = phase;
    for (int i = 0; i < length; ++i) s.values.push_back(10.0 + i);
    return s;
}

Outcome criterion_count() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (int m = 1; m <= 24; ++m) {
        for (int h = 1; h <= 2 * m; ++h) {
            const long formula = count_subseries(m, h);
            const long brute = brute_force_count(m, h);
            const auto plan = enumerate_plan(plain_series(m, 3 * m, 1), h);
            o.check(formula == brute, "m=" + std::to_string(m) + " h=" + std::to_string(h) + " formula " +
                                          std::to_string(formula) + " vs brute " + std::to_string(brute));
            o.check(static_cast<long>(plan.windows.size()) == brute, "plan size differs at m=" + std::to_string(m));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(count_subseries(4, 8) == 13, "m=4 anchor is not 13");
    o.check(secs < 1.0, "took " + fmt(secs) + " s");
    if (o.pass) o.detail = "m in [1,24], h in [1,2m]; " + fmt(secs) + " s";
    return o;
}

Outcome criterion_coverage() {
    Outcome o;
    for (int m = 2; m <= 24; ++m) {
        for (int phase : {1, m}) {
            const int h = m + (m % 3);
            const auto series = plain_series(m, 3 * m, phase);
            const auto plan = enumerate_plan(series, h);
            std::vector<WeightedBundle> bundles;
            std::vector<std::map<int, int>> per_width(static_cast<std::size_t>(h));
            for (const auto& pw : plan.windows) {
                const auto sub = extract(series, pw.window, h);
                for (int t : sub.alignment) per_width[static_cast<std::size_t>(t - 1)][pw.window.width] += pw.multiplicity;
                WeightedBundle wb;
                wb.window = pw.window;
                wb.multiplicity = pw.multiplicity;
                wb.bundle.points.assign(sub.alignment.size(), 1.0);
                wb.bundle.lower = wb.bundle.points;
                wb.bundle.upper = wb.bundle.points;
                wb.bundle.alignment = sub.alignment;
                bundles.push_back(std::move(wb));
            }
            for (int t = 0; t < h; ++t) {
                for (int k = 1; k <= m; ++k) {
                    o.check(per_width[static_cast<std::size_t>(t)][k] == (k < m ? k : m),
                            "m=" + std::to_string(m) + " step " + std::to_string(t + 1) + " width " + std::to_string(k));
                }
            }
            const auto c = combine(bundles, h, CombineMode::FlatPooled);
            for (int n : c.instance_counts) o.check(n == m * (m + 1) / 2, "instance count " + std::to_string(n));
        }
    }
    if (o.pass) o.detail = "m in [2,24], both phases";
    return o;
}

Outcome criterion_metrics() {
    Outcome o;
    const std::vector<double> train{10, 12, 14, 16, 18, 20, 22, 24};
    const std::vector<double> test{25, 29}, test_above{25, 31};
    const std::vector<double> points{26, 28}, biased{26, 30}, lower{20, 20}, upper{30, 30};
    auto input = [&](const std::vector<double>& y, const std::vector<double>& f) {
        return metrics::MetricInput{train, y, f, lower, upper, 4, 0.05};
    };
    const metrics::HorizonRange r{1, 2};
    const double v1 = metrics::mase(input(test, points), r);
    const double v2 = metrics::amse(input(test, points), r);
    const double v3 = metrics::amse(input(test, biased), r);
    const double v4 = metrics::msis(input(test, points), r);
    const double v5 = metrics::msis(input(test_above, points), r);
    o.check(std::abs(v1 - 0.125) <= 1e-10, "MASE " + fmt(v1));
    o.check(std::abs(v2 - 0.0) <= 1e-10, "AMSE " + fmt(v2));
    o.check(std::abs(v3 - 1.0 / 17.0) <= 1e-10, "AMSE " + fmt(v3));
    o.check(std::abs(v4 - 1.25) <= 1e-10, "MSIS " + fmt(v4));
    o.check(std::abs(v5 - 3.75) <= 1e-10, "MSIS " + fmt(v5));
    if (o.pass) o.detail = "MASE 0.125, AMSE 0 and 1/17, MSIS 1.25 and 3.75";
    return o;
}

Outcome criterion_oracle() {
    Outcome o;
    const auto buckets = metrics::horizon_buckets(metrics::FrequencyClass::Quarterly);
    for (int phase = 1; phase <= 4; ++phase) {
        const auto rec = fixtures::seasonal_record("oracle", 4, 24, 8, 3.0, 100 + phase, phase);
        const fixtures::OracleForecaster oracle(rec.test);
        for (auto mode : {CombineMode::FlatPooled, CombineMode::LevelEqual}) {
            ExperimentConfig config;
            config.combine = mode;
            const auto mr = run_multiple(rec, oracle, config, buckets);
            for (const auto& v : mr.run.row.metrics.mase) o.check(v && *v == 0.0, "oracle MASE not exactly 0");
        }
    }
    const double a = 1.7, b = 4.3;
    auto wb = [](int start, int width, std::vector<int> align, double v, int mult) {
        WeightedBundle w;
        w.window = make_window(start, width, 2);
        w.multiplicity = mult;
        w.bundle.points.assign(align.size(), v);
        w.bundle.lower = w.bundle.points;
        w.bundle.upper = w.bundle.points;
        w.bundle.alignment = std::move(align);
        return w;
    };
    const std::vector<WeightedBundle> bs{wb(1, 1, {1}, a, 1), wb(2, 1, {2}, a, 1), wb(1, 2, {1, 2}, b, 2)};
    const auto flat = combine(bs, 2, CombineMode::FlatPooled);
    const auto level = combine(bs, 2, CombineMode::LevelEqual);
    for (std::size_t t = 0; t < 2; ++t) {
        o.check(std::abs(flat.points[t] - (a + 2 * b) / 3) <= 1e-12, "FlatPooled hand case");
        o.check(std::abs(level.points[t] - (a + b) / 2) <= 1e-12, "LevelEqual hand case");
    }
    if (o.pass) o.detail = "oracle MASE = 0 in both modes; m=2 hand case to 1e-12";
    return o;
}

Outcome criterion_degeneracy() {
    Outcome o;
    Dataset ds;
    ds.frequency_class = metrics::FrequencyClass::Quarterly;
    for (int i = 0; i < 4; ++i) {
        ds.records.push_back(fixtures::seasonal_record("y" + std::to_string(i), 1, 30, 8, 2.0, 500 + i));
    }
    ExperimentConfig config;
    config.paths = 500;
    const models::EtsForecaster ets;
    const auto report = run_experiment(ds, config, ets);
    for (const auto& s : report.series) {
        o.check(!s.failed, s.id + " failed");
        if (s.failed) continue;
        const auto& st = s.runs.at(Method::Standard);
        const auto& mu = s.runs.at(Method::Multiple);
        o.check(st.points == mu.points && st.lower == mu.lower && st.upper == mu.upper, s.id + ": forecasts differ");
        o.check(mu.windows_used == 1, s.id + ": more than one window for m = 1");
    }
    // Report rows with the method column removed must pair up exactly.
    auto rows_without_method = [](const std::string& csv, int column, const std::string& method) {
        std::multiset<std::string> out;
        std::stringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::vector<std::string> f(1);
            bool quoted = false;
            for (char c : line) {
                if (c == '"') quoted = !quoted;
                if (c == ',' && !quoted) f.emplace_back();
                else f.back() += c;
            }
            if (f[static_cast<std::size_t>(column)] != method) continue;
            f.erase(f.begin() + column);
            std::string joined;
            for (const auto& x : f) joined += x + ",";
            out.insert(joined);
        }
        return out;
    };
    for (auto [csv, col] : {std::pair{per_series_csv(report), 3}, std::pair{forecasts_csv(report), 1},
                            std::pair{aggregate_csv(report), 0}}) {
        const auto a = rows_without_method(csv, col, "standard");
        const auto b = rows_without_method(csv, col, "multiple");
        o.check(!a.empty() && a == b, "report rows differ between methods");
    }
    if (o.pass) o.detail = "4 series, m = 1, reports identical";
    return o;
}

Outcome criterion_models() {
    Outcome o;
    {
        std::vector<double> y;
        for (int t = 1; t <= 24; ++t) y.push_back(2.0 + 3.0 * t);
        const auto model = models::fit_ets_auto(y, 1);
        const auto fc = models::forecast(model, 8, 0.95, 100, 1);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) worst = std::max(worst, std::abs(fc.points[static_cast<std::size_t>(k - 1)] - (2.0 + 3.0 * (24 + k))));
        o.check(worst <= 1e-6, "linear series error " + fmt(worst));
    }
    {
        const double cycle[4] = {6.0, -3.0, 2.0, -5.0};
        std::vector<double> y;
        for (int t = 1; t <= 28; ++t) y.push_back(40.0 + 0.5 * t + cycle[(t - 1) % 4]);
        const auto model = models::fit_ets_auto(y, 4);
        o.check(model.spec.has_seasonal(), "trend + cycle selected " + model.spec.label());
    }
    {
        const int s1 = 24, s2 = 168;
        std::vector<double> y;
        for (int t = 0; t < 3 * s2 + s1; ++t) {
            const double d = 1.0 + 0.3 * std::sin(2.0 * M_PI * (t % s1) / s1);
            const double w = 1.0 + 0.15 * std::cos(2.0 * M_PI * (t % s2) / s2);
            y.push_back(1000.0 * d * w);
        }
        const std::vector<double> train(y.begin(), y.begin() + 3 * s2);
        const auto model = models::fit_dshw(train, {s1, s2});
        const auto fc = models::forecast(model, s1, 0.95, 10, 1);
        double worst = 0.0;
        for (int k = 0; k < s1; ++k) {
            const double truth = y[static_cast<std::size_t>(3 * s2 + k)];
            worst = std::max(worst, std::abs(fc.points[static_cast<std::size_t>(k)] - truth) / truth);
        }
        o.check(worst <= 1e-4, "DSHW relative error " + fmt(worst));
    }
    if (o.pass) o.detail = "linear, trend + cycle and double-seasonal fixtures";
    return o;
}

Outcome criterion_intervals() {
    Outcome o;
    models::FittedModel m;
    m.spec = {models::Trend::None, models::Seasonal::None, 1};
    m.params.alpha = 0.5;
    m.final_state.level = 10.0;
    m.sigma2 = 1.0;
    const auto fc = models::forecast(m, 1, 0.95, 20000, 31337);
    const double z = 1.959963984540054;
    o.check(std::abs(fc.lower[0] - (10.0 - z)) <= 0.05, "lower " + fmt(fc.lower[0]));
    o.check(std::abs(fc.upper[0] - (10.0 + z)) <= 0.05, "upper " + fmt(fc.upper[0]));

    // Combined intervals on every bundled fixture.
    std::vector<SeriesRecord> records;
    const auto sample = ingest_dataset(fs::path(SUBSEAS_TEST_DATA) / "quarterly_sample.json");
    records = sample.records;
    for (int i = 0; i < 6; ++i) records.push_back(fixtures::seasonal_record("m" + std::to_string(i), 12, 48, 18, 2.0, 900 + i, 1 + i));
    ExperimentConfig config;
    config.paths = 300;
    const models::EtsForecaster ets;
    for (const auto& rec : records) {
        const auto buckets = rec.series.frequency == 12 ? metrics::horizon_buckets(metrics::FrequencyClass::Monthly)
                                                        : metrics::horizon_buckets(metrics::FrequencyClass::Quarterly);
        const auto mr = run_multiple(rec, ets, config, buckets);
        for (std::size_t t = 0; t < mr.run.points.size(); ++t) {
            o.check(std::isfinite(mr.run.lower[t]) && std::isfinite(mr.run.upper[t]) && mr.run.lower[t] <= mr.run.upper[t],
                    rec.series.id + ": bad interval at step " + std::to_string(t + 1));
        }
        for (const auto& v : mr.run.row.metrics.msis) o.check(v && std::isfinite(*v), rec.series.id + ": MSIS not finite");
    }
    if (o.pass) o.detail = "[" + fmt(fc.lower[0]) + ", " + fmt(fc.upper[0]) + "]; " + std::to_string(records.size()) + " fixtures";
    return o;
}

Outcome criterion_dm() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> z(0.0, 1.0);
    int rejections = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> a(40), b(40);
        for (auto& v : a) v = z(rng);
        for (auto& v : b) v = z(rng);
        const auto res = metrics::dm_test(a, b, 1, metrics::Loss::Squared);
        rejections += res.verdict == metrics::DmVerdict::FirstBetter || res.verdict == metrics::DmVerdict::SecondBetter;
        const auto rev = metrics::dm_test(b, a, 1, metrics::Loss::Squared);
        o.check(res.statistic == -rev.statistic && res.p_value == rev.p_value, "antisymmetry broken");
    }
    const double rate = static_cast<double>(rejections) / reps;
    o.check(rate >= 0.03 && rate <= 0.07, "rejection rate " + fmt(rate));
    if (o.pass) o.detail = "rejection rate " + fmt(100 * rate) + "%";
    return o;
}

Outcome criterion_directional() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Dataset ds;
    ds.frequency_class = metrics::FrequencyClass::Monthly;
    for (int i = 0; i < 200; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "s%03d", i);
        ds.records.push_back(fixtures::seasonal_record(id, 12, 48, 18, 4.0, 7000 + i, 1 + i % 12, 5.0));
    }
    ExperimentConfig config;
    config.paths = 20;
    const models::EtsForecaster ets;
    const auto report = run_experiment(ds, config, ets);
    int non_seasonal = 0, ok = 0;
    for (const auto& s : report.series) {
        if (s.failed) continue;
        ++ok;
        const auto& c = s.runs.at(Method::Standard).components;
        non_seasonal += c && !c->has_seasonal;
    }
    const auto whole = report.buckets.size() - 1;
    const auto st = aggregate(report, Method::Standard, "MASE")[whole];
    const auto mu = aggregate(report, Method::Multiple, "MASE")[whole];
    const double share = ok > 0 ? static_cast<double>(non_seasonal) / ok : 0.0;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(ok == 200, std::to_string(200 - ok) + " series failed");
    o.check(share >= 0.30, "non-seasonal share " + fmt(share));
    o.check(mu.mean <= st.mean, "multiple MASE " + fmt(mu.mean) + " > standard " + fmt(st.mean));
    o.check(secs < 300.0, "took " + fmt(secs) + " s");
    const std::string summary = "MASE h1-18 standard " + fmt(st.mean) + ", multiple " + fmt(mu.mean) +
                                "; non-seasonal share " + fmt(share) + "; " + fmt(secs) + " s";
    o.detail = o.pass ? summary : o.detail + " (" + summary + ")";
    return o;
}

Outcome criterion_load() {
    Outcome o;
    MultiSeasonalSeries series;
    series.periods = {24, 168};
    series.id = "load_12weeks.csv";
    series.values = read_load_csv(fs::path(SUBSEAS_TEST_DATA) / "load_12weeks.csv");
    o.check(series.values.size() == 2016, "fixture has " + std::to_string(series.values.size()) + " rows");
    LoadConfig config;
    const models::LoadForecaster dshw;
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_rolling_load(series, config, dshw);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(result.origins.size() == 28, std::to_string(result.origins.size()) + " origins");
    o.check(result.used_origins() == 28, std::to_string(result.used_origins()) + " origins used");
    for (Method m : {Method::Standard, Method::Multiple}) {
        const auto& curve = result.mase_curve.at(m);
        o.check(curve.size() == 24, "curve length " + std::to_string(curve.size()));
        for (const auto& v : curve) o.check(v && std::isfinite(*v), "missing curve value");
    }
    const auto dir = scratch("load");
    emit_load_reports(result, dir, series.id);
    std::stringstream plot(fixtures::slurp(dir / "plot_data.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(plot, line)) ++rows;
    o.check(rows == 24, "plot_data.csv has " + std::to_string(rows) + " rows");
    if (o.pass) {
        double s = 0, m = 0;
        for (int t = 0; t < 24; ++t) {
            s += *result.mase_curve.at(Method::Standard)[static_cast<std::size_t>(t)] / 24;
            m += *result.mase_curve.at(Method::Multiple)[static_cast<std::size_t>(t)] / 24;
        }
        o.detail = "28 origins; mean MASE standard " + fmt(s) + ", multiple " + fmt(m) + "; " + fmt(secs) + " s";
    }
    return o;
}

Outcome criterion_determinism() {
    Outcome o;
    const auto dataset = ingest_dataset(fs::path(SUBSEAS_TEST_DATA) / "quarterly_sample.json");
    ExperimentConfig config;
    config.data = fs::path(SUBSEAS_TEST_DATA) / "quarterly_sample.json";
    config.paths = 300;
    config.seed = 2718;
    config.verbose = true;
    const models::EtsForecaster ets;
    std::vector<fs::path> dirs;
    for (int workers : {1, 1, 4}) {
        config.workers = workers;
        const auto dir = scratch("det" + std::to_string(dirs.size()));
        emit_reports(run_experiment(dataset, config, ets), dir);
        dirs.push_back(dir);
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        ++files;
        const auto ref = fixtures::slurp(entry.path());
        for (std::size_t k = 1; k < dirs.size(); ++k) {
            o.check(fs::exists(dirs[k] / entry.path().filename()) && fixtures::slurp(dirs[k] / entry.path().filename()) == ref,
                    entry.path().filename().string() + " differs");
        }
    }
    // A smaller double-seasonal run at two worker counts.
    MultiSeasonalSeries series;
    series.periods = {4, 28};
    series.id = "mini";
    for (int t = 0; t < 28 * 3; ++t) {
        const double d = 1.0 + 0.2 * std::sin(2.0 * M_PI * (t % 4) / 4.0);
        series.values.push_back(300.0 * d * ((t / 4) % 7 >= 5 ? 0.9 : 1.0) * (1.0 + 0.01 * std::sin(t * 1.7)));
    }
    LoadConfig load;
    load.train = 56;
    load.horizon = 4;
    load.step = 4;
    load.paths = 20;
    const models::LoadForecaster dshw;
    std::vector<std::string> outputs;
    for (int workers : {1, 4}) {
        load.workers = workers;
        const auto dir = scratch("load_det" + std::to_string(workers));
        emit_load_reports(run_rolling_load(series, load, dshw), dir, series.id);
        outputs.push_back(fixtures::slurp(dir / "plot_data.csv") + fixtures::slurp(dir / "origins.csv") +
                          fixtures::slurp(dir / "metadata.json"));
    }
    o.check(outputs[0] == outputs[1], "load reports differ across worker counts");
    if (o.pass) o.detail = std::to_string(files) + " report files identical over reruns and workers {1, 4}";
    return o;
}

}  // namespace

// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.insert(static_cast<std::size_t>(std::stoul(argv[i])));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"count formula matches brute-force enumeration", criterion_count},
        {"coverage identity", criterion_coverage},
        {"metric fixtures", criterion_metrics},
        {"combination oracle and two-level hand case", criterion_oracle},
        {"single-season degeneracy", criterion_degeneracy},
        {"model sanity", criterion_models},
        {"interval calibration", criterion_intervals},
        {"DM test under the null", criterion_dm},
        {"directional synthetic experiment", criterion_directional},
        {"load protocol shape", criterion_load},
        {"determinism and parallel equivalence", criterion_determinism},
    };
    int failures = 0, ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(i + 1)) continue;
        ++ran;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
