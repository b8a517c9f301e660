#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subseas {

/// A single-seasonal series: observations y_1..y_T sampled m times per cycle.
/// Indices are 1-based; start_phase is the season of y_1.
struct SeasonalSeries {
    std::vector<double> values;
    int frequency = 1;
    int start_phase = 1;
    std::string id;
    std::optional<std::string> category;

    std::size_t size() const { return values.size(); }
};

/// Season index in [1, m] of 1-based position `index`. Indices past T
/// address future calendar slots.
inline int season_of(int frequency, int start_phase, long index) {
    const long m = frequency;
    return static_cast<int>(((start_phase - 1 + index - 1) % m + m) % m) + 1;
}

inline int season_of(const SeasonalSeries& series, long index) {
    return season_of(series.frequency, series.start_phase, index);
}

/// Collects every invariant violation instead of stopping at the first one.
inline std::vector<std::string> validate_series(const SeasonalSeries& series) {
    std::vector<std::string> errors;
    if (series.values.empty()) {
        errors.emplace_back("empty series");
    }
    if (series.frequency < 1) {
        errors.emplace_back("frequency must be positive");
    }
    if (series.start_phase < 1 || series.start_phase > std::max(series.frequency, 1)) {
        errors.emplace_back("phase out of range");
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!std::isfinite(series.values[i])) {
            errors.push_back("non-finite at index " + std::to_string(i + 1));
        }
    }
    return errors;
}

/// Hourly-style series with two nested cycles, e.g. (24, 168).
struct MultiSeasonalSeries {
    std::vector<double> values;
    std::pair<int, int> periods{24, 168};
    int day_phase = 1;   // position of y_1 within the short cycle, 1-based
    int week_phase = 1;  // position of y_1 within the long cycle, 1-based
    std::string id;

    int short_period() const { return periods.first; }
    int long_period() const { return periods.second; }
};

inline std::vector<std::string> validate_series(const MultiSeasonalSeries& series) {
    std::vector<std::string> errors;
    const auto [s1, s2] = series.periods;
    if (s1 < 2 || s2 <= 0 || s2 % s1 != 0 || s2 == s1) {
        errors.emplace_back("periods must be nested: s1 >= 2 and s2 a proper multiple of s1");
    }
    if (series.values.empty()) {
        errors.emplace_back("empty series");
    }
    if (series.day_phase < 1 || series.day_phase > std::max(s1, 1)) {
        errors.emplace_back("phase out of range");
    }
    if (series.week_phase < 1 || series.week_phase > std::max(s2, 1)) {
        errors.emplace_back("phase out of range");
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!std::isfinite(series.values[i])) {
            errors.push_back("non-finite at index " + std::to_string(i + 1));
        }
    }
    return errors;
}

/// The short-cycle view used for sub-seasonal windows over hours of the day.
inline SeasonalSeries daily_view(const MultiSeasonalSeries& series) {
    return SeasonalSeries{series.values, series.short_period(), series.day_phase, series.id, std::nullopt};
}

/// Point forecasts and interval bounds for one (sub)series. When alignment is
/// present, entry j refers to original horizon step alignment[j] (1-based).
struct ForecastBundle {
    std::vector<double> points;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.95;
    std::string model_label;
    std::vector<int> alignment;

    std::size_t size() const { return points.size(); }
};

inline void check_bundle(const ForecastBundle& bundle) {
    if (bundle.lower.size() != bundle.points.size() || bundle.upper.size() != bundle.points.size()) {
        throw std::invalid_argument("forecast bundle: bound lengths differ from point length");
    }
    for (std::size_t i = 0; i < bundle.points.size(); ++i) {
        if (!(bundle.lower[i] <= bundle.upper[i])) {
            throw std::invalid_argument("forecast bundle: lower > upper at step " + std::to_string(i + 1));
        }
    }
    if (!bundle.alignment.empty()) {
        if (bundle.alignment.size() != bundle.points.size()) {
            throw std::invalid_argument("forecast bundle: alignment length mismatch");
        }
        for (std::size_t i = 1; i < bundle.alignment.size(); ++i) {
            if (bundle.alignment[i] <= bundle.alignment[i - 1]) {
                throw std::invalid_argument("forecast bundle: alignment not strictly increasing");
            }
        }
    }
}

}  // namespace subseas
