#pragma once

#include <cmath>
#include <span>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "subseas/models/ets.hpp"
#include "subseas/series.hpp"

namespace subseas::models {

/// Repeats the last observed cycle. Intervals are Gaussian with the in-sample
/// seasonal-naive error variance, widened by sqrt(ceil(t / period)).
inline ForecastBundle seasonal_naive(std::span<const double> train, int period, int h, double level = 0.95) {
    if (period < 1) throw ModelError("period must be >= 1");
    if (train.size() < static_cast<std::size_t>(period)) throw ModelError("insufficient data");
    check_interval_args(h, level, 1);

    const std::size_t n = train.size();
    const auto p = static_cast<std::size_t>(period);
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t i = p; i < n; ++i) {
        const double e = train[i] - train[i - p];
        ss += e * e;
        ++count;
    }
    const double sigma = count > 0 ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);

    ForecastBundle out;
    out.level = level;
    out.model_label = "SNAIVE(" + std::to_string(period) + ")";
    for (int t = 1; t <= h; ++t) {
        const auto k = static_cast<std::size_t>(t - 1);
        const double point = train[n - p + k % p];
        const double cycles = std::ceil(static_cast<double>(t) / static_cast<double>(period));
        const double half = z * sigma * std::sqrt(cycles);
        out.points.push_back(point);
        out.lower.push_back(point - half);
        out.upper.push_back(point + half);
    }
    return out;
}

}  // namespace subseas::models
