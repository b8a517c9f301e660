#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subseas/harness/dataset.hpp"
#include "subseas/harness/experiment.hpp"

namespace subseas::harness {

inline constexpr const char* kVersion = "1.0.0";

/// Round-trippable decimal form; "NA" for missing values.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string bucket_header(const std::vector<metrics::HorizonRange>& buckets) {
    std::string h;
    for (const auto& b : buckets) h += "," + b.label();
    return h;
}

/// Methods present in the report, in canonical order.
inline std::vector<Method> report_methods(const EvaluationReport& report) {
    std::vector<Method> out;
    for (Method m : {Method::Standard, Method::Multiple}) {
        if (std::find(report.config.methods.begin(), report.config.methods.end(), m) != report.config.methods.end()) {
            out.push_back(m);
        }
    }
    return out;
}

inline std::string per_series_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "id,category,class,method,metric" << bucket_header(report.buckets) << "\n";
    for (const auto& s : report.series) {
        if (s.failed) continue;
        for (Method m : report_methods(report)) {
            const auto& run = s.runs.at(m);
            for (const auto& metric : metric_names()) {
                os << csv_field(s.id) << "," << csv_field(s.category) << "," << csv_field(s.classification()) << ","
                   << to_string(m) << "," << metric;
                for (const auto& v : metric_column(run.row.metrics, metric)) os << "," << format_number(v);
                os << "\n";
            }
        }
    }
    return os.str();
}

inline std::string aggregate_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "method,metric" << bucket_header(report.buckets) << ",n_series\n";
    for (Method m : report_methods(report)) {
        for (const auto& metric : metric_names()) {
            const auto cells = aggregate(report, m, metric);
            os << to_string(m) << "," << metric;
            int n = 0;
            for (const auto& c : cells) {
                os << "," << (c.n > 0 ? format_number(c.mean) : "NA");
                n = std::max(n, c.n);
            }
            os << "," << n << "\n";
        }
    }
    return os.str();
}

inline std::string dm_summary_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "bucket,n_tests,pct_better,pct_worse,n_no_decision,loss\n";
    for (const auto& d : dm_summary(report)) {
        os << d.bucket.label() << "," << d.tests << "," << format_number(d.pct(d.better)) << ","
           << format_number(d.pct(d.worse)) << "," << d.no_decision << "," << metrics::to_string(report.config.dm_loss)
           << "\n";
    }
    return os.str();
}

inline std::string classes_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "class,n_series,method,metric" << bucket_header(report.buckets) << "\n";
    for (const auto& cls : classify_and_slice(report)) {
        for (Method m : report_methods(report)) {
            for (const auto& metric : metric_names()) {
                const auto cells =
                    aggregate(report, m, metric, [&](const SeriesResult& s) { return s.classification() == cls.label; });
                os << csv_field(cls.label) << "," << cls.count << "," << to_string(m) << "," << metric;
                for (const auto& c : cells) os << "," << (c.n > 0 ? format_number(c.mean) : "NA");
                os << "\n";
            }
        }
    }
    return os.str();
}

/// Mean scaled absolute error per horizon step (the per-step MASE curve).
inline std::vector<std::optional<double>> horizon_curve(const EvaluationReport& report, Method method, int horizon) {
    std::vector<std::optional<double>> out;
    for (int t = 1; t <= horizon; ++t) {
        double sum = 0.0;
        int n = 0;
        for (const auto& s : report.series) {
            if (s.failed || s.horizon < t) continue;
            auto it = s.runs.find(method);
            if (it == s.runs.end()) continue;
            const auto& v = it->second.row.scaled_errors[static_cast<std::size_t>(t - 1)];
            if (v) {
                sum += *v;
                ++n;
            }
        }
        out.push_back(n > 0 ? std::optional<double>(sum / n) : std::nullopt);
    }
    return out;
}

inline std::string plot_data_csv(const std::vector<std::optional<double>>& standard,
                                 const std::vector<std::optional<double>>& multiple, int horizon) {
    std::ostringstream os;
    os << "horizon,mase_standard,mase_multiple\n";
    for (int t = 1; t <= horizon; ++t) {
        const auto i = static_cast<std::size_t>(t - 1);
        os << t << "," << format_number(i < standard.size() ? standard[i] : std::nullopt) << ","
           << format_number(i < multiple.size() ? multiple[i] : std::nullopt) << "\n";
    }
    return os.str();
}

inline int report_horizon(const EvaluationReport& report) {
    int h = 0;
    for (const auto& s : report.series) h = std::max(h, s.horizon);
    return h;
}

inline std::string forecasts_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "id,method,step,point,lower,upper,instances,model\n";
    for (const auto& s : report.series) {
        if (s.failed) continue;
        for (Method m : report_methods(report)) {
            const auto& run = s.runs.at(m);
            for (std::size_t i = 0; i < run.points.size(); ++i) {
                os << csv_field(s.id) << "," << to_string(m) << "," << i + 1 << "," << format_number(run.points[i])
                   << "," << format_number(run.lower[i]) << "," << format_number(run.upper[i]) << ","
                   << run.instance_counts[i] << "," << csv_field(run.model_label) << "\n";
            }
        }
    }
    return os.str();
}

inline std::string levels_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "id,width,step,mean_point\n";
    for (const auto& s : report.series) {
        auto it = s.runs.find(Method::Multiple);
        if (s.failed || it == s.runs.end()) continue;
        for (const auto& row : it->second.levels) {
            for (std::size_t t = 0; t < row.means.size(); ++t) {
                if (row.means[t]) os << csv_field(s.id) << "," << row.width << "," << t + 1 << "," << format_number(*row.means[t]) << "\n";
            }
        }
    }
    return os.str();
}

/// Everything that determines the outputs. Worker count and output
/// directory are left out so that reruns elsewhere or at other worker
/// counts compare byte-for-byte.
inline nlohmann::ordered_json run_metadata(const EvaluationReport& report) {
    const auto& c = report.config;
    nlohmann::ordered_json meta;
    meta["tool"] = "subseas";
    meta["version"] = kVersion;
    nlohmann::ordered_json cfg;
    cfg["data"] = c.data.filename().string();
    std::vector<std::string> methods;
    for (Method m : report_methods(report)) methods.push_back(to_string(m));
    cfg["methods"] = methods;
    cfg["model"] = c.model == models::ModelFamily::Ets ? "ets" : c.model == models::ModelFamily::SeasonalNaive ? "snaive" : "dshw";
    cfg["combine"] = to_string(c.combine);
    cfg["pi"] = c.level;
    cfg["paths"] = c.paths;
    cfg["seed"] = c.seed;
    cfg["category"] = c.category ? nlohmann::ordered_json(*c.category) : nlohmann::ordered_json(nullptr);
    cfg["ids"] = c.ids;
    cfg["verbose"] = c.verbose;
    cfg["dm_loss"] = metrics::to_string(c.dm_loss);
    meta["config"] = cfg;
    meta["frequency_class"] = metrics::to_string(report.frequency_class);
    std::vector<std::string> buckets;
    for (const auto& b : report.buckets) buckets.push_back(b.label());
    meta["buckets"] = buckets;

    int failed = 0, zero_scale = 0, skipped_windows = 0;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    std::vector<std::string> warnings = report.ingest_warnings;
    for (const auto& s : report.series) {
        if (s.failed) {
            ++failed;
            failures.push_back({{"id", s.id}, {"error", s.failure}});
            continue;
        }
        if (!s.runs.empty() && !s.runs.begin()->second.row.scale_ok) ++zero_scale;
        for (const auto& [m, run] : s.runs) skipped_windows += run.windows_skipped;
        warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end());
    }
    meta["counts"] = {{"series_selected", report.series.size()},
                      {"series_failed", failed},
                      {"series_zero_scale_excluded", zero_scale},
                      {"ingest_skipped", report.ingest_skipped},
                      {"windows_skipped", skipped_windows}};
    meta["failures"] = failures;
    meta["warnings"] = warnings;
    return meta;
}

/// Writes per-series, aggregate, DM, class, plot-data, forecast and metadata
/// files into `outdir`; returns the paths written.
inline std::vector<std::filesystem::path> emit_reports(const EvaluationReport& report, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& content) {
        const auto p = outdir / name;
        write_file(p, content);
        written.push_back(p);
    };
    const auto methods = report_methods(report);
    const bool both = methods.size() == 2;
    const int horizon = report_horizon(report);

    put("per_series.csv", per_series_csv(report));
    put("aggregate.csv", aggregate_csv(report));
    if (both) put("dm_summary.csv", dm_summary_csv(report));
    if (classification_available(report)) put("classes.csv", classes_csv(report));
    put("plot_data.csv", plot_data_csv(horizon_curve(report, Method::Standard, horizon),
                                       horizon_curve(report, Method::Multiple, horizon), horizon));
    put("forecasts.csv", forecasts_csv(report));
    if (report.config.verbose) put("levels.csv", levels_csv(report));
    put("metadata.json", run_metadata(report).dump(2) + "\n");
    return written;
}

}  // namespace subseas::harness
