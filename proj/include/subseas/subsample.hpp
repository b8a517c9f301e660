#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subseas/series.hpp"

namespace subseas {

/// A block of `width` adjacent seasons starting at `start_season`, wrapping
/// around the cycle. Q4&Q1 is stored as start 4, width 2. The full-width
/// window is canonicalised to start 1.
struct SeasonWindow {
    int start_season = 1;
    int width = 1;
    int frequency = 1;

    bool is_original() const { return width == frequency; }

    bool contains(int season) const {
        const int offset = ((season - start_season) % frequency + frequency) % frequency;
        return offset < width;
    }

    /// Position (0-based) of `season` within the window, or -1.
    int offset_of(int season) const {
        const int offset = ((season - start_season) % frequency + frequency) % frequency;
        return offset < width ? offset : -1;
    }

    std::vector<int> seasons() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(width));
        for (int j = 0; j < width; ++j) {
            out.push_back((start_season - 1 + j) % frequency + 1);
        }
        return out;
    }

    std::string label() const {
        std::string s = "w" + std::to_string(width) + "s" + std::to_string(start_season);
        return s;
    }

    friend bool operator==(const SeasonWindow&, const SeasonWindow&) = default;
};

inline SeasonWindow make_window(int start_season, int width, int frequency) {
    if (frequency < 1 || width < 1 || width > frequency || start_season < 1 || start_season > frequency) {
        throw std::invalid_argument("invalid season window");
    }
    return SeasonWindow{width == frequency ? 1 : start_season, width, frequency};
}

struct PlannedWindow {
    SeasonWindow window;
    int multiplicity = 1;
};

struct SubseriesPlan {
    std::vector<PlannedWindow> windows;
    long expected_count = 0;
    std::set<int> horizon_seasons;
};

/// Observations of one window, plus the map from its forecast steps back to
/// the original horizon.
struct AlignedSubseries {
    SeasonWindow window;
    std::vector<double> sub_values;
    int sub_frequency = 1;
    int sub_horizon = 0;
    std::vector<int> alignment;
    /// Within-window position (1-based) of the first retained observation.
    int sub_start_phase = 1;
};

/// Number of distinct sub-seasonal series that must be forecast for horizon h.
inline long count_subseries(long m, long h) {
    if (m <= 0 || h <= 0) {
        throw std::invalid_argument("count_subseries: m and h must be positive");
    }
    if (h < m) {
        return (m - h) * (m + h - 1) / 2 + (h - 1) * m + 1;
    }
    return m * (m - 1) + 1;
}

inline std::set<int> horizon_seasons(const SeasonalSeries& series, int h) {
    std::set<int> out;
    const long T = static_cast<long>(series.size());
    for (int t = 1; t <= h; ++t) {
        out.insert(season_of(series, T + t));
    }
    return out;
}

/// Widths 1..m-1 at every start whose season set meets the future seasons,
/// then the original once with multiplicity m. Ordered by width, then start.
inline SubseriesPlan enumerate_plan(const SeasonalSeries& series, int h) {
    if (h < 1) {
        throw std::invalid_argument("enumerate_plan: horizon must be >= 1");
    }
    if (auto errors = validate_series(series); !errors.empty()) {
        throw std::invalid_argument("enumerate_plan: " + errors.front());
    }
    const int m = series.frequency;
    SubseriesPlan plan;
    plan.horizon_seasons = horizon_seasons(series, h);
    plan.expected_count = count_subseries(m, h);
    for (int k = 1; k < m; ++k) {
        for (int s = 1; s <= m; ++s) {
            const SeasonWindow w{s, k, m};
            bool hit = false;
            for (int season : plan.horizon_seasons) {
                if (w.contains(season)) {
                    hit = true;
                    break;
                }
            }
            if (hit) {
                plan.windows.push_back({w, 1});
            }
        }
    }
    plan.windows.push_back({SeasonWindow{1, m, m}, m});
    return plan;
}

/// Keeps the observations whose season lies in `window`, in time order.
inline AlignedSubseries extract(const SeasonalSeries& series, const SeasonWindow& window, int h) {
    if (window.frequency != series.frequency) {
        throw std::invalid_argument("extract: window frequency differs from series frequency");
    }
    AlignedSubseries out;
    out.window = window;
    out.sub_frequency = window.width;
    const long T = static_cast<long>(series.size());
    bool first = true;
    for (long t = 1; t <= T; ++t) {
        const int season = season_of(series, t);
        if (window.contains(season)) {
            if (first) {
                out.sub_start_phase = window.offset_of(season) + 1;
                first = false;
            }
            out.sub_values.push_back(series.values[static_cast<std::size_t>(t - 1)]);
        }
    }
    for (int t = 1; t <= h; ++t) {
        if (window.contains(season_of(series, T + t))) {
            out.alignment.push_back(t);
        }
    }
    out.sub_horizon = static_cast<int>(out.alignment.size());
    if (out.sub_values.empty()) {
        throw std::invalid_argument("extract: empty subseries for window " + window.label());
    }
    if (out.alignment.empty()) {
        throw std::invalid_argument("extract: window " + window.label() + " covers no horizon step");
    }
    return out;
}

/// Minimum training length below which a subseries is skipped.
inline std::size_t min_subseries_length(int width) {
    return static_cast<std::size_t>(std::max(4, 2 * width));
}

/// One entry of the load plan: a window over hours of the day and the
/// seasonal periods its subseries is modelled with.
struct LoadWindow {
    SeasonWindow window;
    int multiplicity = 1;
    std::vector<int> periods;
};

/// Same windows as enumerate_plan over the short cycle. Width 1 keeps one
/// observation per day, so only the day-of-week period r = s2/s1 remains;
/// width w keeps (w, r*w).
inline std::vector<LoadWindow> enumerate_load_plan(const MultiSeasonalSeries& series, int h) {
    const auto [s1, s2] = series.periods;
    if (s1 < 2 || s2 <= s1 || s2 % s1 != 0) {
        throw std::invalid_argument("enumerate_load_plan: non-nested periods");
    }
    if (h < 1 || h > s1) {
        throw std::invalid_argument("enumerate_load_plan: horizon must lie in [1, s1]");
    }
    const int ratio = s2 / s1;
    const auto plan = enumerate_plan(daily_view(series), h);
    std::vector<LoadWindow> out;
    out.reserve(plan.windows.size());
    for (const auto& pw : plan.windows) {
        const int w = pw.window.width;
        std::vector<int> periods = w == 1 ? std::vector<int>{ratio} : std::vector<int>{w, ratio * w};
        out.push_back({pw.window, pw.multiplicity, std::move(periods)});
    }
    return out;
}

}  // namespace subseas
