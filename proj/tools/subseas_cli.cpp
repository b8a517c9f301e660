// subseas: command-line harness for sub-seasonal forecast combination.
//
//   subseas run --data <json> --out <dir> [...]
//   subseas load-eval --csv <csv> --out <dir> [...]
//   subseas count --m <int> --h <int>
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subseas/harness/dataset.hpp"
#include "subseas/harness/experiment.hpp"
#include "subseas/harness/load.hpp"
#include "subseas/harness/report.hpp"
#include "subseas/subsample.hpp"

namespace {

using namespace subseas;
using namespace subseas::harness;

constexpr int kConfigError = 1;
constexpr int kIoError = 2;

std::vector<Method> parse_methods(const std::string& s) {
    if (s == "standard") return {Method::Standard};
    if (s == "multiple") return {Method::Multiple};
    if (s == "both") return {Method::Standard, Method::Multiple};
    throw std::invalid_argument("unknown method: " + s);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

std::vector<std::string> read_ids(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open id list " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct RunArgs {
    std::string data;
    std::string method = "both";
    std::string model = "ets";
    std::string combine = "pooled";
    double pi = 0.95;
    int paths = 1000;
    std::uint64_t seed = 42;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<std::string> category;
    std::optional<std::string> ids;
    bool verbose = false;
    std::string loss = "absolute";
};

struct LoadArgs {
    std::string csv;
    std::string periods = "24,168";
    int train = 1344;
    int horizon = 24;
    int step = 24;
    std::string method = "both";
    std::string combine = "pooled";
    double pi = 0.95;
    int paths = 100;
    std::uint64_t seed = 42;
    bool ar = false;
    std::optional<int> workers;
    std::optional<std::string> out;
};

std::string resolve_out(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (auto e = env("SUBSEAS_OUT")) return *e;
    throw std::invalid_argument("--out is required (or set SUBSEAS_OUT)");
}

int resolve_workers(const std::optional<int>& flag) {
    if (flag) return *flag;
    if (auto e = env("SUBSEAS_WORKERS")) {
        try {
            return std::stoi(*e);
        } catch (const std::exception&) {
            throw std::invalid_argument("SUBSEAS_WORKERS is not an integer: " + *e);
        }
    }
    return 1;
}

int do_run(const RunArgs& a) {
    ExperimentConfig config;
    config.data = a.data;
    config.methods = parse_methods(a.method);
    config.model = models::parse_model_family(a.model);
    if (config.model == models::ModelFamily::Dshw) {
        throw std::invalid_argument("model dshw is only available through load-eval");
    }
    config.combine = parse_combine_mode(a.combine);
    config.level = a.pi;
    config.paths = a.paths;
    config.seed = a.seed;
    config.workers = resolve_workers(a.workers);
    config.out = resolve_out(a.out);
    config.category = a.category;
    config.verbose = a.verbose;
    config.dm_loss = metrics::parse_loss(a.loss);
    config.validate();
    if (a.ids) config.ids = read_ids(*a.ids);

    const auto dataset = ingest_dataset(config.data);
    print_warnings(dataset.warnings);
    const auto forecaster = models::make_forecaster(config.model);
    const auto report = run_experiment(dataset, config, *forecaster);
    for (const auto& s : report.series) {
        if (a.verbose) print_warnings(s.warnings);
        if (s.failed) std::cerr << "failed: " << s.id << ": " << s.failure << "\n";
    }
    emit_reports(report, config.out);
    std::cout << aggregate_csv(report);
    return 0;
}

int do_load_eval(const LoadArgs& a) {
    MultiSeasonalSeries series;
    {
        const auto comma = a.periods.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("--periods expects s1,s2");
        try {
            series.periods = {std::stoi(a.periods.substr(0, comma)), std::stoi(a.periods.substr(comma + 1))};
        } catch (const std::exception&) {
            throw std::invalid_argument("--periods expects two integers, got " + a.periods);
        }
    }
    LoadConfig config;
    config.train = a.train;
    config.horizon = a.horizon;
    config.step = a.step;
    config.methods = parse_methods(a.method);
    config.combine = parse_combine_mode(a.combine);
    config.level = a.pi;
    config.paths = a.paths;
    config.seed = a.seed;
    config.use_ar = a.ar;
    config.workers = resolve_workers(a.workers);
    const std::string out = resolve_out(a.out);

    series.values = read_load_csv(a.csv);
    series.id = std::filesystem::path(a.csv).filename().string();
    config.validate(series);

    models::LoadForecaster forecaster;
    const auto result = run_rolling_load(series, config, forecaster);
    emit_load_reports(result, out, series.id);
    std::cout << plot_data_csv(result.mase_curve.count(Method::Standard) ? result.mase_curve.at(Method::Standard)
                                                                          : std::vector<std::optional<double>>{},
                               result.mase_curve.count(Method::Multiple) ? result.mase_curve.at(Method::Multiple)
                                                                         : std::vector<std::optional<double>>{},
                               config.horizon);
    std::cerr << "origins: " << result.origins.size() << " (used " << result.used_origins() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forecasting seasonal series by combining sub-seasonal subseries forecasts"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Standard vs multiple evaluation on a JSON dataset");
    run_cmd->add_option("--data", run.data, "Dataset JSON")->required();
    run_cmd->add_option("--method", run.method, "standard|multiple|both")->capture_default_str();
    run_cmd->add_option("--model", run.model, "ets|snaive")->capture_default_str();
    run_cmd->add_option("--combine", run.combine, "pooled|level-equal")->capture_default_str();
    run_cmd->add_option("--pi", run.pi, "Prediction interval level")->capture_default_str();
    run_cmd->add_option("--paths", run.paths, "Simulated sample paths per interval")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
    run_cmd->add_option("--workers", run.workers, "Worker threads (env SUBSEAS_WORKERS)");
    run_cmd->add_option("--out", run.out, "Output directory (env SUBSEAS_OUT)");
    run_cmd->add_option("--category", run.category, "Only series in this category");
    run_cmd->add_option("--ids", run.ids, "File with one series id per line");
    run_cmd->add_option("--dm-loss", run.loss, "absolute|squared")->capture_default_str();
    run_cmd->add_flag("--verbose", run.verbose, "Per-level diagnostics and window warnings");

    LoadArgs load;
    auto* load_cmd = app.add_subcommand("load-eval", "Rolling-origin evaluation on hourly load data");
    load_cmd->add_option("--csv", load.csv, "CSV with header timestamp,demand")->required();
    load_cmd->add_option("--periods", load.periods, "Nested seasonal periods s1,s2")->capture_default_str();
    load_cmd->add_option("--train", load.train, "Initial training length")->capture_default_str();
    load_cmd->add_option("--horizon", load.horizon, "Forecast horizon per origin")->capture_default_str();
    load_cmd->add_option("--step", load.step, "Origin advance")->capture_default_str();
    load_cmd->add_option("--method", load.method, "standard|multiple|both")->capture_default_str();
    load_cmd->add_option("--combine", load.combine, "pooled|level-equal")->capture_default_str();
    load_cmd->add_option("--pi", load.pi, "Prediction interval level")->capture_default_str();
    load_cmd->add_option("--paths", load.paths, "Simulated sample paths per interval")->capture_default_str();
    load_cmd->add_option("--seed", load.seed, "Master seed")->capture_default_str();
    load_cmd->add_option("--workers", load.workers, "Worker threads (env SUBSEAS_WORKERS)");
    load_cmd->add_option("--out", load.out, "Output directory (env SUBSEAS_OUT)");
    load_cmd->add_flag("--ar", load.ar, "AR(1) residual adjustment in DSHW");

    long m = 0, h = 0;
    auto* count_cmd = app.add_subcommand("count", "Number of subseries to forecast");
    count_cmd->set_help_flag("--help", "Print this help message and exit");
    count_cmd->add_option("--m", m, "Frequency")->required();
    count_cmd->add_option("--h", h, "Horizon")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*run_cmd) return do_run(run);
        if (*load_cmd) return do_load_eval(load);
        if (*count_cmd) {
            std::cout << count_subseries(m, h) << "\n";
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
