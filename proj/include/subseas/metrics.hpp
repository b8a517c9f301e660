#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace subseas::metrics {

class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inclusive 1-based range of horizon steps.
struct HorizonRange {
    int first = 1;
    int last = 1;

    int length() const { return last - first + 1; }
    std::string label() const {
        return first == last ? "h" + std::to_string(first) : "h" + std::to_string(first) + "-" + std::to_string(last);
    }
    friend bool operator==(const HorizonRange&, const HorizonRange&) = default;
};

struct MetricInput {
    std::span<const double> train;
    std::span<const double> test;
    std::span<const double> points;
    std::span<const double> lower;
    std::span<const double> upper;
    int m = 1;
    double alpha = 0.05;
};

/// Mean absolute in-sample seasonal difference (the MASE/MSIS scale).
inline double seasonal_scale(std::span<const double> train, int m) {
    if (m < 1) throw std::invalid_argument("frequency must be >= 1");
    const auto lag = static_cast<std::size_t>(m);
    if (train.size() <= lag) throw MetricError("training series must be longer than its frequency");
    double sum = 0.0;
    for (std::size_t t = lag; t < train.size(); ++t) sum += std::abs(train[t] - train[t - lag]);
    return sum / static_cast<double>(train.size() - lag);
}

namespace detail {

inline void check_range(const MetricInput& in, HorizonRange r) {
    if (r.first < 1 || r.first > r.last || static_cast<std::size_t>(r.last) > in.test.size() ||
        static_cast<std::size_t>(r.last) > in.points.size()) {
        throw std::invalid_argument("horizon range " + r.label() + " out of bounds");
    }
}

inline double positive_scale(const MetricInput& in) {
    const double d = seasonal_scale(in.train, in.m);
    if (!(d > 0.0)) throw MetricError("zero scaled denominator");
    return d;
}

}  // namespace detail

inline double mase(const MetricInput& in, HorizonRange r) {
    detail::check_range(in, r);
    const double d = detail::positive_scale(in);
    double sum = 0.0;
    for (int t = r.first; t <= r.last; ++t) {
        const auto i = static_cast<std::size_t>(t - 1);
        sum += std::abs(in.test[i] - in.points[i]);
    }
    return sum / r.length() / d;
}

/// Absolute mean signed error scaled by the training mean.
inline double amse(const MetricInput& in, HorizonRange r) {
    detail::check_range(in, r);
    if (in.train.empty()) throw MetricError("zero train mean");
    const double mean = std::accumulate(in.train.begin(), in.train.end(), 0.0) / static_cast<double>(in.train.size());
    if (mean == 0.0) throw MetricError("zero train mean");
    double sum = 0.0;
    for (int t = r.first; t <= r.last; ++t) {
        const auto i = static_cast<std::size_t>(t - 1);
        sum += in.test[i] - in.points[i];
    }
    return std::abs(sum / r.length() / mean);
}

inline double interval_score(double lower, double upper, double y, double alpha) {
    double score = upper - lower;
    if (y < lower) score += 2.0 / alpha * (lower - y);
    if (y > upper) score += 2.0 / alpha * (y - upper);
    return score;
}

inline double msis(const MetricInput& in, HorizonRange r) {
    detail::check_range(in, r);
    if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (in.lower.size() < static_cast<std::size_t>(r.last) || in.upper.size() < static_cast<std::size_t>(r.last)) {
        throw std::invalid_argument("interval bounds shorter than horizon range");
    }
    const double d = detail::positive_scale(in);
    double sum = 0.0;
    for (int t = r.first; t <= r.last; ++t) {
        const auto i = static_cast<std::size_t>(t - 1);
        sum += interval_score(in.lower[i], in.upper[i], in.test[i], in.alpha);
    }
    return sum / r.length() / d;
}

enum class FrequencyClass { Quarterly, Monthly, Hourly };

inline FrequencyClass parse_frequency_class(const std::string& s) {
    if (s == "quarterly") return FrequencyClass::Quarterly;
    if (s == "monthly") return FrequencyClass::Monthly;
    if (s == "hourly") return FrequencyClass::Hourly;
    throw std::invalid_argument("unknown frequency class: " + s);
}

inline std::string to_string(FrequencyClass c) {
    switch (c) {
        case FrequencyClass::Quarterly: return "quarterly";
        case FrequencyClass::Monthly: return "monthly";
        case FrequencyClass::Hourly: return "hourly";
    }
    return "unknown";
}

inline int default_frequency(FrequencyClass c) {
    switch (c) {
        case FrequencyClass::Quarterly: return 4;
        case FrequencyClass::Monthly: return 12;
        case FrequencyClass::Hourly: return 24;
    }
    return 1;
}

inline int default_horizon(FrequencyClass c) {
    switch (c) {
        case FrequencyClass::Quarterly: return 8;
        case FrequencyClass::Monthly: return 18;
        case FrequencyClass::Hourly: return 48;
    }
    return 1;
}

/// Reporting buckets: the first step, three consecutive blocks, and the whole horizon.
inline std::vector<HorizonRange> horizon_buckets(FrequencyClass c) {
    switch (c) {
        case FrequencyClass::Quarterly: return {{1, 1}, {1, 3}, {4, 6}, {7, 8}, {1, 8}};
        case FrequencyClass::Monthly: return {{1, 1}, {1, 6}, {7, 12}, {13, 18}, {1, 18}};
        case FrequencyClass::Hourly: return {{1, 1}, {1, 16}, {17, 32}, {33, 48}, {1, 48}};
    }
    throw std::invalid_argument("unknown frequency class");
}

inline std::vector<HorizonRange> horizon_buckets(const std::string& c) { return horizon_buckets(parse_frequency_class(c)); }

enum class Loss { Absolute, Squared };

inline std::string to_string(Loss l) { return l == Loss::Absolute ? "absolute" : "squared"; }

inline Loss parse_loss(const std::string& s) {
    if (s == "absolute") return Loss::Absolute;
    if (s == "squared") return Loss::Squared;
    throw std::invalid_argument("unknown loss: " + s);
}

enum class DmVerdict {
    NoDecision,        // zero-variance differential
    NotSignificant,
    FirstBetter,       // errors_a has significantly smaller loss
    SecondBetter,
};

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int horizon = 1;
    int n = 0;
    DmVerdict verdict = DmVerdict::NoDecision;
};

/// Diebold-Mariano test with the Harvey-Leybourne-Newbold small-sample
/// correction; long-run variance from autocovariances up to lag h-1;
/// two-sided p-value from Student-t with n-1 degrees of freedom.
inline DmResult dm_test(std::span<const double> errors_a, std::span<const double> errors_b, int h,
                        Loss loss = Loss::Absolute, double significance = 0.05) {
    if (errors_a.size() != errors_b.size()) throw std::invalid_argument("dm_test: error sequences differ in length");
    if (h < 1) throw std::invalid_argument("dm_test: horizon must be >= 1");
    const auto n = static_cast<int>(errors_a.size());
    if (n < h + 1) throw std::invalid_argument("dm_test: need at least h + 1 loss differentials");

    auto L = [loss](double e) { return loss == Loss::Absolute ? std::abs(e) : e * e; };
    std::vector<double> d(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = L(errors_a[i]) - L(errors_b[i]);

    DmResult out;
    out.horizon = h;
    out.n = n;
    if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); })) {
        out.verdict = DmVerdict::NoDecision;
        return out;
    }

    const double dn = n;
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / dn;
    auto autocov = [&](int lag) {
        double s = 0.0;
        for (int i = lag; i < n; ++i) {
            s += (d[static_cast<std::size_t>(i)] - mean) * (d[static_cast<std::size_t>(i - lag)] - mean);
        }
        return s / dn;
    };
    double variance = autocov(0);
    for (int k = 1; k < h; ++k) variance += 2.0 * autocov(k);
    if (!(variance > 0.0)) {
        out.verdict = DmVerdict::NoDecision;
        return out;
    }

    const double correction = std::sqrt((dn + 1.0 - 2.0 * h + h * (h - 1.0) / dn) / dn);
    out.statistic = mean / std::sqrt(variance / dn) * correction;
    const boost::math::students_t dist(dn - 1.0);
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(dist, -std::abs(out.statistic)));
    if (out.p_value < significance) {
        out.verdict = out.statistic < 0.0 ? DmVerdict::FirstBetter : DmVerdict::SecondBetter;
    } else {
        out.verdict = DmVerdict::NotSignificant;
    }
    return out;
}

}  // namespace subseas::metrics
