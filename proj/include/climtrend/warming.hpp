#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "climtrend/distributions.hpp"
#include "climtrend/math.hpp"
#include "climtrend/regression.hpp"

namespace climtrend::warming {

// ---------------------------------------------------------------------------
// Acceleration
// ---------------------------------------------------------------------------

/// Which pair of regressions the acceleration test compares. The displayed
/// definition pits the full sample against the suffix t = s+1..T; the
/// prefix-vs-suffix variant compares t = 1..s against t = s+1..T.
enum class AccelMode { full_vs_suffix, prefix_vs_suffix };

struct AccelerationResult {
    double beta_full = 0.0;   ///< first-regression slope
    double beta_late = 0.0;   ///< suffix slope
    double t_diff = 0.0;      ///< (beta_late - beta_full) / se of the difference
    double p_one_sided = 1.0; ///< H0: equal slopes vs beta_late > beta_full
    int split_year = 0;
    AccelMode mode = AccelMode::full_vs_suffix;
};

struct AccelerationOptions {
    AccelMode mode = AccelMode::full_vs_suffix;
    int bandwidth = -1;  ///< -1 -> default rule on the full length
};

/// Tests whether the trend steepens after `split_year` (the last year of the
/// early segment). The two estimators share observations, so their covariance
/// is estimated from jointly stacked HAC scores over the full span.
inline AccelerationResult acceleration_test(const dist::CharacteristicSeries& series,
                                            int split_year,
                                            const AccelerationOptions& opts = {}) {
    const std::size_t T = series.size();
    if (T < 5) throw std::invalid_argument("acceleration_test: series too short");
    const auto split_it =
        std::find(series.years.begin(), series.years.end(), split_year);
    if (split_it == series.years.end())
        throw std::invalid_argument("acceleration_test: split year not in sample");
    const std::size_t s =
        static_cast<std::size_t>(split_it - series.years.begin()) + 1;  // early length
    if (s == 0 || s >= T)
        throw std::invalid_argument("acceleration_test: split must be strictly inside sample");
    const std::size_t late_len = T - s;
    if (late_len < 10)
        throw std::invalid_argument("acceleration_test: late segment needs >= 10 years");
    if (opts.mode == AccelMode::prefix_vs_suffix && s < 3)
        throw std::invalid_argument("acceleration_test: early segment needs >= 3 years");

    const auto x = reg::trend_regressor(series);
    const std::size_t first_lo = 0;
    const std::size_t first_hi = opts.mode == AccelMode::full_vs_suffix ? T : s;

    auto segment_fit = [&](std::size_t lo, std::size_t hi) {
        std::span<const double> ys(series.values.data() + lo, hi - lo);
        std::span<const double> xs(x.data() + lo, hi - lo);
        return reg::ols_line(ys, xs);
    };
    const auto fit1 = segment_fit(first_lo, first_hi);
    const auto fit2 = segment_fit(s, T);

    auto segment_mean_x = [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t t = lo; t < hi; ++t) m += x[t];
        return m / static_cast<double>(hi - lo);
    };
    const double xbar1 = segment_mean_x(first_lo, first_hi);
    const double xbar2 = segment_mean_x(s, T);

    // joint scores over the full span, zero outside each segment
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T), 2);
    for (std::size_t t = first_lo; t < first_hi; ++t)
        scores(static_cast<Eigen::Index>(t), 0) =
            (x[t] - xbar1) * fit1.residuals[t - first_lo];
    for (std::size_t t = s; t < T; ++t)
        scores(static_cast<Eigen::Index>(t), 1) = (x[t] - xbar2) * fit2.residuals[t - s];

    const int bw = opts.bandwidth >= 0 ? opts.bandwidth : reg::default_bandwidth(T);
    const Eigen::MatrixXd omega = reg::hac_covariance(scores, bw);
    const double Td = static_cast<double>(T);
    const double v11 = Td * omega(0, 0) / (fit1.sxx * fit1.sxx);
    const double v22 = Td * omega(1, 1) / (fit2.sxx * fit2.sxx);
    const double v12 = Td * omega(0, 1) / (fit1.sxx * fit2.sxx);
    const double var_diff = std::max(v11 + v22 - 2.0 * v12, 0.0);

    AccelerationResult res;
    res.beta_full = fit1.beta;
    res.beta_late = fit2.beta;
    res.split_year = split_year;
    res.mode = opts.mode;
    const double diff = fit2.beta - fit1.beta;
    const double se = std::sqrt(var_diff);
    // an exactly linear series leaves both slopes equal up to rounding and the
    // variance equal to rounding noise; the ratio is meaningless, so pin it
    const double beta_scale = std::fabs(fit1.beta) + std::fabs(fit2.beta);
    if (std::fabs(diff) <= 1e-10 * beta_scale) {
        res.t_diff = 0.0;
    } else if (se > 0.0) {
        res.t_diff = diff / se;
    } else {
        res.t_diff = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    res.p_one_sided = normal_sf(res.t_diff);
    return res;
}

// ---------------------------------------------------------------------------
// Amplification
// ---------------------------------------------------------------------------

/// Whether the mean series comes from the same region's distribution (inner)
/// or from a reference region (outer).
enum class AmplificationMode { inner, outer };

struct AmplificationResult {
    dist::CharacteristicId id = dist::CharacteristicId::q50;
    double tau = 0.5;
    double slope_on_mean = 0.0;
    double se_hac = 0.0;
    double t_stat = 0.0;       ///< (slope - 1) / se
    double p_one_sided = 1.0;  ///< H0: slope = 1 vs slope > 1
    AmplificationMode mode = AmplificationMode::inner;
};

/// Regression C_t = b0 + b1 * mean_t, one-sided HAC test of b1 = 1 vs > 1.
inline AmplificationResult amplification_test(const dist::CharacteristicSeries& characteristic,
                                              const dist::CharacteristicSeries& mean_series,
                                              AmplificationMode mode, int bandwidth = -1) {
    reg::TrendTestOptions opts;
    opts.bandwidth = bandwidth;
    opts.sidedness = reg::Sidedness::one_sided_greater;
    const auto fit = reg::covariate_regression(characteristic, mean_series, 1.0, opts);

    AmplificationResult res;
    res.id = characteristic.id;
    if (dist::is_quantile(characteristic.id)) res.tau = dist::quantile_tau(characteristic.id);
    res.slope_on_mean = fit.beta;
    res.se_hac = fit.se_hac;
    res.t_stat = fit.t_stat;
    res.p_one_sided = fit.p_value;
    res.mode = mode;
    return res;
}

// ---------------------------------------------------------------------------
// Dominance
// ---------------------------------------------------------------------------

enum class DominanceVerdict { a_dominates, b_dominates, partial_a_upper, partial_b_lower, none };

inline std::string_view to_string(DominanceVerdict v) {
    switch (v) {
        case DominanceVerdict::a_dominates: return "A-dominates";
        case DominanceVerdict::b_dominates: return "B-dominates";
        case DominanceVerdict::partial_a_upper: return "partial-A-upper";
        case DominanceVerdict::partial_b_lower: return "partial-B-lower";
        case DominanceVerdict::none: return "none";
    }
    return "?";
}

struct DominanceRow {
    double tau = 0.0;
    double beta = 0.0;
    double t_stat = 0.0;
    double p_two_sided = 1.0;
};

struct DominanceResult {
    std::vector<DominanceRow> rows;  ///< taus strictly increasing
    DominanceVerdict verdict = DominanceVerdict::none;
    double level = 0.10;
};

namespace detail {

/// Verdict from the per-tau rows. A dominates when no slope is significantly
/// negative and at least one is significantly positive (and symmetrically for
/// B). With significant slopes of both signs the verdict is partial and names
/// the side whose significant slopes sit higher on the tau axis:
/// partial-A-upper when the positives occupy the upper tail, partial-B-lower
/// when the positives occupy the lower tail (so B holds the upper one).
inline DominanceVerdict dominance_verdict(std::span<const DominanceRow> rows, double level) {
    bool sig_pos = false, sig_neg = false;
    double tau_pos = 0.0, tau_neg = 0.0;
    int n_pos = 0, n_neg = 0;
    for (const auto& r : rows) {
        if (r.p_two_sided < level) {
            if (r.beta > 0.0) {
                sig_pos = true;
                tau_pos += r.tau;
                ++n_pos;
            } else if (r.beta < 0.0) {
                sig_neg = true;
                tau_neg += r.tau;
                ++n_neg;
            }
        }
    }
    if (!sig_pos && !sig_neg) return DominanceVerdict::none;
    if (sig_pos && !sig_neg) return DominanceVerdict::a_dominates;
    if (sig_neg && !sig_pos) return DominanceVerdict::b_dominates;
    return tau_pos / n_pos > tau_neg / n_neg ? DominanceVerdict::partial_a_upper
                                             : DominanceVerdict::partial_b_lower;
}

}  // namespace detail

/// Warming dominance of region A over region B: per-tau trend tests on the
/// quantile-difference series q_tau(A) - q_tau(B).
inline DominanceResult dominance_test(std::span<const dist::CharacteristicSeries> quantiles_a,
                                      std::span<const dist::CharacteristicSeries> quantiles_b,
                                      std::span<const double> tau_grid, double level = 0.10,
                                      int bandwidth = -1) {
    if (quantiles_a.size() != tau_grid.size() || quantiles_b.size() != tau_grid.size())
        throw std::invalid_argument("dominance_test: tau grid mismatch");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()))
        throw std::invalid_argument("dominance_test: tau grid must be increasing");

    DominanceResult res;
    res.level = level;
    reg::TrendTestOptions opts;
    opts.bandwidth = bandwidth;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const auto tt = reg::spacing_test(quantiles_a[i], quantiles_b[i], opts);
        DominanceRow row;
        row.tau = tau_grid[i];
        row.beta = tt.beta;
        row.t_stat = tt.t_stat;
        row.p_two_sided = tt.p_two_sided();
        res.rows.push_back(row);
    }
    res.verdict = detail::dominance_verdict(res.rows, level);
    return res;
}

// ---------------------------------------------------------------------------
// Typology
// ---------------------------------------------------------------------------

enum class WarmingType { W0, W1, W2, W3 };

inline std::string_view to_string(WarmingType t) {
    switch (t) {
        case WarmingType::W0: return "W0";
        case WarmingType::W1: return "W1";
        case WarmingType::W2: return "W2";
        case WarmingType::W3: return "W3";
    }
    return "?";
}

/// Everything the classifier looks at, retained as evidence.
struct TypologyInputs {
    std::vector<reg::TrendResult> quantile_trends;  ///< one per quantile characteristic
    reg::WaldResult all_quantiles_wald;             ///< equality of all quantile slopes
    reg::TrendResult iqr_spacing;                   ///< trend of q75 - q25
    reg::TrendResult q95_q05_spacing;               ///< trend of q95 - q05
};

struct TypologyVerdict {
    WarmingType label = WarmingType::W0;
    bool low_confidence = false;  ///< contradictory evidence, label from dominant spacing sign
    double level = 0.10;
    TypologyInputs evidence;
};

/// W0 when no quantile trend rejects; W1 when quantiles co-trend and the iqr
/// has no trend; otherwise W2/W3 by the sign of the significant dispersion
/// trend. Contradictory evidence (co-trending rejected, both spacing tests
/// insignificant, or significant spacings of opposite sign) falls back to the
/// spacing test with the larger |t| and flags the verdict.
inline TypologyVerdict classify_typology(TypologyInputs inputs, double level = 0.10) {
    TypologyVerdict verdict;
    verdict.level = level;

    bool any_trend = false;
    for (const auto& tr : inputs.quantile_trends)
        if (tr.p_two_sided() < level) any_trend = true;

    const bool wald_rejects = inputs.all_quantiles_wald.p_value < level;
    const bool iqr_rejects = inputs.iqr_spacing.p_two_sided() < level;
    const bool wide_rejects = inputs.q95_q05_spacing.p_two_sided() < level;

    if (!any_trend) {
        verdict.label = WarmingType::W0;
    } else if (!wald_rejects && !iqr_rejects) {
        verdict.label = WarmingType::W1;
    } else {
        const bool sig_neg = (iqr_rejects && inputs.iqr_spacing.beta < 0.0) ||
                             (wide_rejects && inputs.q95_q05_spacing.beta < 0.0);
        const bool sig_pos = (iqr_rejects && inputs.iqr_spacing.beta > 0.0) ||
                             (wide_rejects && inputs.q95_q05_spacing.beta > 0.0);
        if (sig_neg && !sig_pos) {
            verdict.label = WarmingType::W2;
        } else if (sig_pos && !sig_neg) {
            verdict.label = WarmingType::W3;
        } else {
            const bool iqr_stronger =
                std::fabs(inputs.iqr_spacing.t_stat) >= std::fabs(inputs.q95_q05_spacing.t_stat);
            const double sign =
                iqr_stronger ? inputs.iqr_spacing.beta : inputs.q95_q05_spacing.beta;
            verdict.label = sign < 0.0 ? WarmingType::W2 : WarmingType::W3;
            verdict.low_confidence = true;
        }
    }
    verdict.evidence = std::move(inputs);
    return verdict;
}

/// Builds the classifier inputs from a full characteristic-series set.
inline TypologyInputs typology_inputs(std::span<const dist::CharacteristicSeries> series,
                                      int bandwidth = -1) {
    auto series_of = [&](dist::CharacteristicId id) -> const dist::CharacteristicSeries& {
        return series[static_cast<std::size_t>(id)];
    };
    reg::TrendTestOptions opts;
    opts.bandwidth = bandwidth;

    TypologyInputs inputs;
    std::vector<dist::CharacteristicSeries> quantiles;
    for (auto id : dist::all_characteristics()) {
        if (!dist::is_quantile(id)) continue;
        quantiles.push_back(series_of(id));
        inputs.quantile_trends.push_back(reg::trend_test(series_of(id), opts));
    }
    inputs.all_quantiles_wald =
        reg::multi_trend_wald(quantiles, bandwidth, "equal slopes: all quantiles");
    inputs.iqr_spacing = reg::trend_test(series_of(dist::CharacteristicId::iqr), opts);
    inputs.q95_q05_spacing = reg::spacing_test(series_of(dist::CharacteristicId::q95),
                                               series_of(dist::CharacteristicId::q05), opts);
    return inputs;
}

}  // namespace climtrend::warming
