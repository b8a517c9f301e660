#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subseas/series.hpp"
#include "subseas/subsample.hpp"

namespace subseas {

enum class CombineMode {
    /// Mean over every forecast instance covering a step; the original
    /// contributes `multiplicity` identical instances.
    FlatPooled,
    /// Mean within each information level, then an equal-weight mean over
    /// the levels covering the step.
    LevelEqual,
};

inline std::string to_string(CombineMode mode) { return mode == CombineMode::FlatPooled ? "pooled" : "level-equal"; }

inline CombineMode parse_combine_mode(const std::string& s) {
    if (s == "pooled" || s == "flat") return CombineMode::FlatPooled;
    if (s == "level-equal" || s == "level") return CombineMode::LevelEqual;
    throw std::invalid_argument("unknown combine mode: " + s);
}

/// One subseries forecast ready for pooling; bundle.alignment is required.
struct WeightedBundle {
    ForecastBundle bundle;
    SeasonWindow window;
    int multiplicity = 1;

    int width() const { return window.width; }
};

struct CombinedForecast {
    std::vector<double> points;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> instance_counts;
    CombineMode mode = CombineMode::FlatPooled;
};

namespace detail {

struct Instance {
    int width;
    double value;
    int weight;

    friend bool operator<(const Instance& a, const Instance& b) {
        if (a.width != b.width) return a.width < b.width;
        if (a.value != b.value) return a.value < b.value;
        return a.weight < b.weight;
    }
};

/// Sorted input makes the sum independent of the order bundles arrived in.
inline double pooled_mean(std::vector<Instance>& xs) {
    std::sort(xs.begin(), xs.end());
    if (std::all_of(xs.begin(), xs.end(), [&](const Instance& x) { return x.value == xs.front().value; })) {
        return xs.front().value;  // exact when every instance agrees
    }
    double sum = 0.0;
    long weight = 0;
    for (const auto& x : xs) {
        sum += x.value * x.weight;
        weight += x.weight;
    }
    return sum / static_cast<double>(weight);
}

inline double level_equal_mean(std::vector<Instance>& xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<Instance> level_means;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j].width == xs[i].width) ++j;
        std::vector<Instance> level(xs.begin() + static_cast<std::ptrdiff_t>(i),
                                    xs.begin() + static_cast<std::ptrdiff_t>(j));
        level_means.push_back({0, pooled_mean(level), 1});
        i = j;
    }
    return pooled_mean(level_means);
}

template <class Member>
std::vector<std::vector<Instance>> gather(std::span<const WeightedBundle> bundles, int h, Member member) {
    std::vector<std::vector<Instance>> per_step(static_cast<std::size_t>(h));
    for (const auto& wb : bundles) {
        const auto& b = wb.bundle;
        const auto& values = b.*member;
        for (std::size_t j = 0; j < b.alignment.size(); ++j) {
            const int t = b.alignment[j];
            if (t < 1 || t > h) throw std::invalid_argument("combine: alignment step out of range");
            per_step[static_cast<std::size_t>(t - 1)].push_back({wb.width(), values[j], wb.multiplicity});
        }
    }
    return per_step;
}

}  // namespace detail

/// Equal-weight pooling of aligned subseries forecasts, applied separately
/// to points, lower bounds and upper bounds.
inline CombinedForecast combine(std::span<const WeightedBundle> bundles, int h,
                                CombineMode mode = CombineMode::FlatPooled) {
    if (h < 1) throw std::invalid_argument("combine: horizon must be >= 1");
    for (const auto& wb : bundles) {
        check_bundle(wb.bundle);
        if (wb.bundle.alignment.size() != wb.bundle.points.size()) {
            throw std::invalid_argument("combine: bundle without alignment");
        }
        if (wb.multiplicity < 1) throw std::invalid_argument("combine: multiplicity must be >= 1");
    }

    CombinedForecast out;
    out.mode = mode;
    auto reduce = [&](std::vector<std::vector<detail::Instance>> per_step, std::vector<double>& dest) {
        dest.resize(static_cast<std::size_t>(h));
        for (int t = 1; t <= h; ++t) {
            auto& xs = per_step[static_cast<std::size_t>(t - 1)];
            if (xs.empty()) throw std::invalid_argument("combine: no coverage at step " + std::to_string(t));
            dest[static_cast<std::size_t>(t - 1)] =
                mode == CombineMode::FlatPooled ? detail::pooled_mean(xs) : detail::level_equal_mean(xs);
        }
    };
    auto points = detail::gather(bundles, h, &ForecastBundle::points);
    out.instance_counts.resize(static_cast<std::size_t>(h));
    for (int t = 0; t < h; ++t) {
        int count = 0;
        for (const auto& x : points[static_cast<std::size_t>(t)]) count += x.weight;
        out.instance_counts[static_cast<std::size_t>(t)] = count;
    }
    reduce(std::move(points), out.points);
    reduce(detail::gather(bundles, h, &ForecastBundle::lower), out.lower);
    reduce(detail::gather(bundles, h, &ForecastBundle::upper), out.upper);
    return out;
}

struct LevelRow {
    int width = 0;
    std::vector<std::optional<double>> means;  // per step; empty when the level does not cover it
};

/// Per-level mean point forecasts, one row per width present.
inline std::vector<LevelRow> combine_levels_report(std::span<const WeightedBundle> bundles, int h) {
    std::map<int, std::vector<std::vector<detail::Instance>>> by_width;
    for (const auto& wb : bundles) {
        auto& steps = by_width[wb.width()];
        steps.resize(static_cast<std::size_t>(h));
        for (std::size_t j = 0; j < wb.bundle.alignment.size(); ++j) {
            const int t = wb.bundle.alignment[j];
            if (t < 1 || t > h) throw std::invalid_argument("combine_levels_report: alignment step out of range");
            steps[static_cast<std::size_t>(t - 1)].push_back({wb.width(), wb.bundle.points[j], wb.multiplicity});
        }
    }
    std::vector<LevelRow> rows;
    for (auto& [width, steps] : by_width) {
        LevelRow row{width, {}};
        for (auto& xs : steps) {
            row.means.push_back(xs.empty() ? std::nullopt : std::optional<double>(detail::pooled_mean(xs)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace subseas
