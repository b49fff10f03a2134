#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace tndkit {

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_sd(std::span<const double> xs) {
    std::size_t n = xs.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Standard normal quantile, Wichura's AS241 (double precision region).
double normal_quantile(double p);

// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// Slope of ln(value) against ln(n). Returns nullopt when any value is too
// small to log (e.g. an exactly-zero RMSE from a constant estimator).
inline std::optional<double> loglog_slope(std::span<const double> ns,
                                          std::span<const double> values,
                                          double floor = 1e-300) {
    if (ns.size() != values.size() || ns.size() < 2) return std::nullopt;
    std::vector<double> lx, ly;
    lx.reserve(ns.size());
    ly.reserve(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(values[i] > floor)) return std::nullopt;
        lx.push_back(std::log(ns[i]));
        ly.push_back(std::log(values[i]));
    }
    return ls_slope(lx, ly);
}

} // namespace tndkit
