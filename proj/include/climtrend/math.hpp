#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace climtrend {

/// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal upper-tail probability P(Z > x).
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

/// Two-sided normal p-value for a t-like statistic.
inline double two_sided_normal_p(double t) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    return std::erfc(std::fabs(t) / std::sqrt(2.0));
}

/// Upper-tail probability of a chi-squared distribution with df degrees of freedom.
inline double chi_squared_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi_squared_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

/// SplitMix64 step, used to derive independent per-replication seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace climtrend
