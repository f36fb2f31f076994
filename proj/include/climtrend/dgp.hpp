#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "climtrend/distributions.hpp"
#include "climtrend/math.hpp"
#include "climtrend/regression.hpp"

namespace climtrend::sim {

enum class DgpKind {
    iid,
    ar1,
    polynomial_trend,
    random_walk,
    fractional,
    near_unit_root,
    local_level,
};

inline std::string_view to_string(DgpKind k) {
    switch (k) {
        case DgpKind::iid: return "iid";
        case DgpKind::ar1: return "ar1";
        case DgpKind::polynomial_trend: return "polynomial-trend";
        case DgpKind::random_walk: return "random-walk";
        case DgpKind::fractional: return "fractional";
        case DgpKind::near_unit_root: return "near-unit-root";
        case DgpKind::local_level: return "local-level";
    }
    return "?";
}

/// Specification of one simulated series C_t = mu + z_t.
struct DgpSpec {
    DgpKind kind = DgpKind::iid;
    double rho = 0.0;                ///< ar1 coefficient
    std::vector<double> poly;        ///< polynomial-trend coefficients c0 + c1 t + c2 t^2 + ...
    double d = 1.0;                  ///< fractional integration order, (1/2, 3/2)
    double c = 0.0;                  ///< near-unit-root localizing constant, rho_T = 1 - c/T
    double q = 0.0;                  ///< local-level noise-to-signal variance ratio
    double mu = 0.0;
    double sigma = 1.0;              ///< innovation standard deviation
    int length = 100;
    std::uint64_t seed = 0;

    DgpSpec with(int T, std::uint64_t s) const {
        DgpSpec out = *this;
        out.length = T;
        out.seed = s;
        return out;
    }
};

namespace detail {

inline void validate(const DgpSpec& spec) {
    if (spec.length < 2) throw std::invalid_argument("generate: length must be >= 2");
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("generate: sigma must be > 0");
    switch (spec.kind) {
        case DgpKind::ar1:
            if (std::fabs(spec.rho) >= 1.0)
                throw std::invalid_argument("generate: ar1 needs |rho| < 1");
            break;
        case DgpKind::fractional:
            if (!(spec.d > 0.5 && spec.d < 1.5))
                throw std::invalid_argument("generate: fractional d must be in (1/2, 3/2)");
            break;
        case DgpKind::local_level:
            if (spec.q < 0.0) throw std::invalid_argument("generate: local-level q must be >= 0");
            break;
        default:
            break;
    }
}

}  // namespace detail

/// Draws one series from the spec. Identical spec and seed reproduce the
/// series bit for bit.
inline std::vector<double> generate_values(const DgpSpec& spec) {
    detail::validate(spec);
    const int T = spec.length;
    std::mt19937_64 rng(splitmix64(spec.seed));
    std::normal_distribution<double> normal(0.0, spec.sigma);

    std::vector<double> z(static_cast<std::size_t>(T), 0.0);
    switch (spec.kind) {
        case DgpKind::iid: {
            for (auto& v : z) v = normal(rng);
            break;
        }
        case DgpKind::ar1: {
            // stationary initialization
            z[0] = normal(rng) / std::sqrt(1.0 - spec.rho * spec.rho);
            for (int t = 1; t < T; ++t) z[t] = spec.rho * z[t - 1] + normal(rng);
            break;
        }
        case DgpKind::polynomial_trend: {
            for (int t = 0; t < T; ++t) {
                double tp = 1.0;
                double trend = 0.0;
                for (double coef : spec.poly) {
                    trend += coef * tp;
                    tp *= static_cast<double>(t + 1);
                }
                z[t] = trend + normal(rng);
            }
            break;
        }
        case DgpKind::random_walk: {
            double acc = 0.0;
            for (auto& v : z) {
                acc += normal(rng);
                v = acc;
            }
            break;
        }
        case DgpKind::near_unit_root: {
            const double rho_t = 1.0 - spec.c / static_cast<double>(T);
            z[0] = normal(rng);
            for (int t = 1; t < T; ++t) z[t] = rho_t * z[t - 1] + normal(rng);
            break;
        }
        case DgpKind::local_level: {
            std::normal_distribution<double> eps(0.0, spec.sigma * std::sqrt(spec.q));
            double level = 0.0;
            for (auto& v : z) {
                level += normal(rng);
                v = level + (spec.q > 0.0 ? eps(rng) : 0.0);
            }
            break;
        }
        case DgpKind::fractional: {
            // type-II expansion of (1-L)^{-d}: psi_0 = 1, psi_j = psi_{j-1}(d+j-1)/j.
            // Coefficients kept past the sample start so truncation never binds.
            std::vector<double> psi(static_cast<std::size_t>(T));
            psi[0] = 1.0;
            for (int j = 1; j < T; ++j)
                psi[j] = psi[j - 1] * (spec.d + static_cast<double>(j) - 1.0) /
                         static_cast<double>(j);
            std::vector<double> eps(static_cast<std::size_t>(T));
            for (auto& e : eps) e = normal(rng);
            for (int t = 0; t < T; ++t) {
                double acc = 0.0;
                for (int j = 0; j <= t; ++j) acc += psi[j] * eps[t - j];
                z[t] = acc;
            }
            break;
        }
    }
    if (spec.mu != 0.0)
        for (auto& v : z) v += spec.mu;
    return z;
}

/// Wraps one simulated draw as a characteristic series on years 1..T.
inline dist::CharacteristicSeries generate(const DgpSpec& spec) {
    dist::CharacteristicSeries s;
    s.id = dist::CharacteristicId::mean;
    s.values = generate_values(spec);
    s.years.resize(s.values.size());
    for (std::size_t t = 0; t < s.years.size(); ++t) s.years[t] = static_cast<int>(t) + 1;
    return s;
}

/// Runs fn(rep) for rep in [0, reps) across threads; per-rep outputs land in
/// a preallocated slot so the result never depends on scheduling.
template <typename Fn>
void parallel_reps(int reps, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(reps));
    if (workers <= 1) {
        for (int r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) fn(r);
        });
    }
    for (auto& th : pool) th.join();
}

/// Which variance feeds the simulated trend t-statistic. The divergence-rate
/// results concern the plain LS statistic; the HAC flavor matches the
/// empirical trend test.
enum class TStatFlavor { classic_ols, hac };

struct RateCheckResult {
    std::string label;
    std::vector<int> lengths;
    std::vector<double> medians;   ///< median |stat| per length
    double fitted_exponent = 0.0;  ///< slope of log median vs log T
    double target_exponent = 0.0;
    double tolerance = 0.15;
    bool pass = false;
};

namespace detail {

inline double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double log_log_slope(std::span<const int> lengths, std::span<const double> medians) {
    const std::size_t k = lengths.size();
    std::vector<double> lx(k), ly(k);
    for (std::size_t i = 0; i < k; ++i) {
        lx[i] = std::log(static_cast<double>(lengths[i]));
        ly[i] = std::log(medians[i]);
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        xbar += lx[i];
        ybar += ly[i];
    }
    xbar /= static_cast<double>(k);
    ybar /= static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxy += (lx[i] - xbar) * (ly[i] - ybar);
        sxx += (lx[i] - xbar) * (lx[i] - xbar);
    }
    return sxy / sxx;
}

template <typename StatFn>
RateCheckResult rate_check(const DgpSpec& spec, std::span<const int> lengths, int reps,
                           double target, double tolerance, std::string label, StatFn&& stat) {
    if (lengths.size() < 3)
        throw std::invalid_argument("rate_check: need at least 3 lengths");
    if (!std::is_sorted(lengths.begin(), lengths.end()))
        throw std::invalid_argument("rate_check: lengths must be increasing");
    if (reps < 200) throw std::invalid_argument("rate_check: need at least 200 reps");

    RateCheckResult res;
    res.label = std::move(label);
    res.lengths.assign(lengths.begin(), lengths.end());
    res.target_exponent = target;
    res.tolerance = tolerance;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        const int T = lengths[li];
        std::vector<double> stats(static_cast<std::size_t>(reps));
        parallel_reps(reps, [&](int r) {
            const std::uint64_t rep_seed =
                splitmix64(spec.seed ^ (static_cast<std::uint64_t>(li) << 40) ^
                           static_cast<std::uint64_t>(r));
            const auto series = generate(spec.with(T, rep_seed));
            stats[static_cast<std::size_t>(r)] = std::fabs(stat(series));
        });
        res.medians.push_back(median_of(stats));
    }
    res.fitted_exponent = log_log_slope(res.lengths, res.medians);
    res.pass = std::fabs(res.fitted_exponent - target) <= tolerance;
    return res;
}

}  // namespace detail

/// Median |beta_hat| scaling across lengths, compared against the target
/// exponent (-3/2 for an I(0) DGP, -1/2 for I(1), 0 for a real trend).
inline RateCheckResult rate_check_beta(const DgpSpec& spec, std::span<const int> lengths,
                                       int reps, double target_exponent,
                                       double tolerance = 0.15) {
    return detail::rate_check(
        spec, lengths, reps, target_exponent, tolerance,
        std::string("beta/") + std::string(to_string(spec.kind)),
        [](const dist::CharacteristicSeries& s) { return reg::ols_trend(s).beta; });
}

/// Median |t_{beta=0}| scaling across lengths; the persistent models share the
/// 1/2 divergence target.
inline RateCheckResult rate_check_tstat(const DgpSpec& spec, std::span<const int> lengths,
                                        int reps, double target_exponent,
                                        double tolerance = 0.15,
                                        TStatFlavor flavor = TStatFlavor::classic_ols) {
    return detail::rate_check(
        spec, lengths, reps, target_exponent, tolerance,
        std::string("tstat/") + std::string(to_string(spec.kind)),
        [flavor](const dist::CharacteristicSeries& s) {
            if (flavor == TStatFlavor::hac) return reg::trend_test(s).t_stat;
            const auto fit = reg::ols_trend(s);
            const std::size_t T = fit.residuals.size();
            double ssr = 0.0;
            for (double u : fit.residuals) ssr += u * u;
            const double sigma2 = ssr / static_cast<double>(T - 2);
            const double se = std::sqrt(sigma2 / fit.sxx);
            return se > 0.0 ? fit.beta / se : 0.0;
        });
}

}  // namespace climtrend::sim
