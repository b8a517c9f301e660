#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subseas/harness/dataset.hpp"
#include "subseas/models/forecaster.hpp"

namespace fixtures {

/// Trend + additive seasonal + Gaussian noise; `length` training points
/// followed by `horizon` test points.
inline subseas::harness::SeriesRecord seasonal_record(const std::string& id, int m, int length, int horizon,
                                                      double noise_sd, std::uint64_t seed, int start_phase = 1,
                                                      double amplitude = 5.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> pattern(static_cast<std::size_t>(m));
    double mean = 0.0;
    for (auto& p : pattern) {
        p = amplitude * u(rng);
        mean += p / m;
    }
    for (auto& p : pattern) p -= mean;
    const double level = 100.0 + 20.0 * u(rng);
    const double slope = 0.3 * u(rng);

    subseas::harness::SeriesRecord rec;
    rec.series.id = id;
    rec.series.frequency = m;
    rec.series.start_phase = start_phase;
    rec.horizon = horizon;
    for (int t = 0; t < length + horizon; ++t) {
        const int season = (start_phase - 1 + t) % m;
        const double y = level + slope * t + pattern[static_cast<std::size_t>(season)] + noise(rng);
        (t < length ? rec.series.values : rec.test).push_back(y);
    }
    return rec;
}

/// Returns the true future value at every covered horizon step.
class OracleForecaster final : public subseas::models::Forecaster {
public:
    explicit OracleForecaster(std::vector<double> future) : future_(std::move(future)) {}
    std::string name() const override { return "oracle"; }
    subseas::models::ForecastOutcome forecast(const subseas::models::SubseriesTask& task,
                                              const subseas::models::ForecastSettings& settings,
                                              std::uint64_t) const override {
        subseas::ForecastBundle b;
        b.level = settings.level;
        b.model_label = "oracle";
        for (int t : task.alignment) {
            const double v = future_.at(static_cast<std::size_t>(t - 1));
            b.points.push_back(v);
            b.lower.push_back(v - 1.0);
            b.upper.push_back(v + 1.0);
        }
        return {b, std::nullopt};
    }

private:
    std::vector<double> future_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Double-seasonal hourly demand: daily and weekly profiles with mild
/// drift and noise, strictly positive.
inline std::vector<double> hourly_load(int hours, std::uint64_t seed, double noise_sd = 0.01) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    std::vector<double> y;
    for (int t = 0; t < hours; ++t) {
        const int hour = t % 24;
        const int day = (t / 24) % 7;
        const double daily = 1.0 + 0.25 * std::sin(2.0 * M_PI * (hour - 6) / 24.0) + 0.08 * std::cos(4.0 * M_PI * hour / 24.0);
        const double weekly = day >= 5 ? 0.85 : 1.0 + 0.02 * day;
        y.push_back(5000.0 * (1.0 + 0.00002 * t) * daily * weekly * (1.0 + noise(rng)));
    }
    return y;
}

}  // namespace fixtures
