#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "climtrend/distributions.hpp"
#include "climtrend/math.hpp"

namespace climtrend::reg {

enum class Sidedness { two_sided, one_sided_greater };

/// Result of a single trend (or covariate) regression with HAC inference.
struct TrendResult {
    double alpha = 0.0;        ///< intercept
    double beta = 0.0;         ///< slope
    double se_hac = 0.0;       ///< HAC standard error of beta
    double t_stat = 0.0;
    double p_value = 1.0;      ///< p-value under `sidedness`
    Sidedness sidedness = Sidedness::two_sided;
    int T = 0;                 ///< sample length
    int bandwidth = 0;         ///< HAC lag count used
    bool degenerate = false;   ///< zero-variance input, beta pinned to 0

    double p_two_sided() const { return two_sided_normal_p(t_stat); }
    double p_one_sided_greater() const { return normal_sf(t_stat); }
};

struct WaldResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::string restriction;  ///< human-readable description of H0
};

/// Standard Newey-West bandwidth rule floor(4 * (T/100)^(2/9)).
inline int default_bandwidth(std::size_t T) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
}

/// Bartlett-kernel long-run variance of a score sequence:
/// Gamma_0 + sum_{j=1..bw} (1 - j/(bw+1)) (Gamma_j + Gamma_j'), Gamma_j with 1/T scaling.
inline double hac_variance(std::span<const double> scores, int bandwidth) {
    if (bandwidth < 0) throw std::invalid_argument("hac_variance: bandwidth must be >= 0");
    const std::size_t T = scores.size();
    if (T == 0) return 0.0;
    double lrv = 0.0;
    for (double s : scores) lrv += s * s;
    lrv /= static_cast<double>(T);
    const int maxlag = std::min<int>(bandwidth, static_cast<int>(T) - 1);
    for (int j = 1; j <= maxlag; ++j) {
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < T; ++t)
            gamma += scores[t] * scores[t - j];
        gamma /= static_cast<double>(T);
        lrv += 2.0 * (1.0 - static_cast<double>(j) / (bandwidth + 1.0)) * gamma;
    }
    return std::max(lrv, 0.0);
}

/// Bartlett-kernel long-run covariance of vector scores (rows = periods).
inline Eigen::MatrixXd hac_covariance(const Eigen::MatrixXd& scores, int bandwidth) {
    if (bandwidth < 0) throw std::invalid_argument("hac_covariance: bandwidth must be >= 0");
    const auto T = scores.rows();
    const auto m = scores.cols();
    Eigen::MatrixXd omega = scores.transpose() * scores / static_cast<double>(T);
    const int maxlag = std::min<int>(bandwidth, static_cast<int>(T) - 1);
    for (int j = 1; j <= maxlag; ++j) {
        Eigen::MatrixXd gamma =
            scores.bottomRows(T - j).transpose() * scores.topRows(T - j) / static_cast<double>(T);
        const double w = 1.0 - static_cast<double>(j) / (bandwidth + 1.0);
        omega += w * (gamma + gamma.transpose());
    }
    // keep the estimate symmetric against rounding
    omega = 0.5 * (omega + omega.transpose()).eval();
    (void)m;
    return omega;
}

struct OlsLineFit {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> residuals;
    double sxx = 0.0;  ///< sum of squared demeaned regressor
};

/// OLS of y on an intercept and a single regressor x.
inline OlsLineFit ols_line(std::span<const double> y, std::span<const double> x) {
    const std::size_t T = y.size();
    if (T != x.size()) throw std::invalid_argument("ols_line: length mismatch");
    if (T < 3) throw std::invalid_argument("ols_line: need at least 3 observations");
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        xbar += x[t];
        ybar += y[t];
    }
    xbar /= static_cast<double>(T);
    ybar /= static_cast<double>(T);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sxy += (y[t] - ybar) * (x[t] - xbar);
        sxx += (x[t] - xbar) * (x[t] - xbar);
    }
    if (sxx <= 0.0) throw std::invalid_argument("ols_line: zero-variance regressor");
    OlsLineFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = ybar - fit.beta * xbar;
    fit.sxx = sxx;
    fit.residuals.resize(T);
    for (std::size_t t = 0; t < T; ++t) fit.residuals[t] = y[t] - fit.alpha - fit.beta * x[t];
    return fit;
}

/// Time regressor 1..T shifted to the series' own year axis (slope is per year;
/// the shift only moves the intercept).
inline std::vector<double> trend_regressor(const dist::CharacteristicSeries& series) {
    std::vector<double> x(series.years.size());
    const int base = series.years.empty() ? 0 : series.years.front() - 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<double>(series.years[i] - base);
    return x;
}

/// OLS trend fit C_t = alpha + beta*t + u_t.
inline OlsLineFit ols_trend(const dist::CharacteristicSeries& series) {
    const auto x = trend_regressor(series);
    return ols_line(series.values, x);
}

struct TrendTestOptions {
    int bandwidth = -1;  ///< -1 -> default_bandwidth(T)
    Sidedness sidedness = Sidedness::two_sided;
};

namespace detail {

inline TrendResult finish_single_test(const OlsLineFit& fit, std::span<const double> x,
                                      int bandwidth, Sidedness sidedness, double null_value) {
    const std::size_t T = fit.residuals.size();
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(T);

    std::vector<double> scores(T);
    for (std::size_t t = 0; t < T; ++t) scores[t] = (x[t] - xbar) * fit.residuals[t];

    const double lrv = hac_variance(scores, bandwidth);
    const double var_beta = static_cast<double>(T) * lrv / (fit.sxx * fit.sxx);

    TrendResult res;
    res.alpha = fit.alpha;
    res.beta = fit.beta;
    res.se_hac = std::sqrt(std::max(var_beta, 0.0));
    res.T = static_cast<int>(T);
    res.bandwidth = bandwidth;
    res.sidedness = sidedness;
    const double diff = fit.beta - null_value;
    if (res.se_hac > 0.0) {
        res.t_stat = diff / res.se_hac;
    } else {
        // residuals identically zero: exact fit
        res.t_stat = diff == 0.0 ? 0.0
                                 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    res.p_value = sidedness == Sidedness::two_sided ? res.p_two_sided()
                                                    : res.p_one_sided_greater();
    return res;
}

}  // namespace detail

/// HAC trend test of H0: beta = 0 in C_t = alpha + beta*t + u_t.
inline TrendResult trend_test(const dist::CharacteristicSeries& series,
                              const TrendTestOptions& opts = {}) {
    const std::size_t T = series.size();
    if (T < 3) throw std::invalid_argument("trend_test: need at least 3 observations");
    const int bw = opts.bandwidth >= 0 ? opts.bandwidth : default_bandwidth(T);

    double vmin = series.values.front(), vmax = vmin;
    for (double v : series.values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax == vmin) {
        TrendResult res;
        res.alpha = vmin;
        res.beta = 0.0;
        res.se_hac = 0.0;
        res.t_stat = 0.0;
        res.p_value = 1.0;
        res.sidedness = opts.sidedness;
        res.T = static_cast<int>(T);
        res.bandwidth = bw;
        res.degenerate = true;
        return res;
    }

    const auto x = trend_regressor(series);
    const auto fit = ols_line(series.values, x);
    return detail::finish_single_test(fit, x, bw, opts.sidedness, 0.0);
}

/// OLS of y on a covariate series with HAC inference. `null_value` is the
/// slope under H0 (0 for a plain association test, 1 for amplification).
inline TrendResult covariate_regression(const dist::CharacteristicSeries& y,
                                        const dist::CharacteristicSeries& x,
                                        double null_value = 0.0,
                                        const TrendTestOptions& opts = {}) {
    if (y.years != x.years)
        throw std::invalid_argument("covariate_regression: year axes are not aligned");
    const std::size_t T = y.size();
    if (T < 3) throw std::invalid_argument("covariate_regression: need at least 3 observations");
    const int bw = opts.bandwidth >= 0 ? opts.bandwidth : default_bandwidth(T);
    const auto fit = ols_line(y.values, x.values);  // throws on zero-variance covariate
    return detail::finish_single_test(fit, x.values, bw, opts.sidedness, null_value);
}

/// Trend test applied to the difference series C_i - C_j (the m=2 co-trending test).
inline TrendResult spacing_test(const dist::CharacteristicSeries& a,
                                const dist::CharacteristicSeries& b,
                                const TrendTestOptions& opts = {}) {
    if (a.years != b.years)
        throw std::invalid_argument("spacing_test: year axes are not aligned");
    dist::CharacteristicSeries diff;
    diff.id = a.id;
    diff.years = a.years;
    diff.values.resize(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) diff.values[t] = a.values[t] - b.values[t];
    return trend_test(diff, opts);
}

/// Wald test of equal trend slopes across m series sharing the same year axis.
///
/// Each equation is estimated by OLS on the common regressor; the joint
/// covariance of the slopes comes from the Bartlett HAC estimate of the
/// stacked per-equation score sequences.
inline WaldResult multi_trend_wald(std::span<const dist::CharacteristicSeries> series,
                                   int bandwidth = -1,
                                   std::string restriction = "equal trend slopes") {
    const std::size_t m = series.size();
    if (m < 2) throw std::invalid_argument("multi_trend_wald: need at least 2 series");
    const std::size_t T = series[0].size();
    for (const auto& s : series) {
        if (s.years != series[0].years)
            throw std::invalid_argument("multi_trend_wald: year axes are not aligned");
    }
    if (T < 3) throw std::invalid_argument("multi_trend_wald: need at least 3 observations");
    const int bw = bandwidth >= 0 ? bandwidth : default_bandwidth(T);

    const auto x = trend_regressor(series[0]);
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(T);

    Eigen::VectorXd beta(m);
    Eigen::MatrixXd scores(T, m);
    double sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto fit = ols_line(series[i].values, x);
        beta[static_cast<Eigen::Index>(i)] = fit.beta;
        sxx = fit.sxx;
        for (std::size_t t = 0; t < T; ++t)
            scores(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
                (x[t] - xbar) * fit.residuals[t];
    }

    const Eigen::MatrixXd omega = hac_covariance(scores, bw);
    const Eigen::MatrixXd vbeta = static_cast<double>(T) * omega / (sxx * sxx);

    // adjacent slope differences
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m - 1, m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = -1.0;
    }
    const Eigen::VectorXd rb = R * beta;
    const Eigen::MatrixXd rvr = R * vbeta * R.transpose();

    WaldResult res;
    res.df = static_cast<int>(m) - 1;
    res.restriction = std::move(restriction);

    const double scale = beta.cwiseAbs().maxCoeff();
    if (rb.cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1.0)) {
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(rvr);
    if (!lu.isInvertible())
        throw std::runtime_error("multi_trend_wald: restriction covariance is rank deficient");
    res.statistic = rb.dot(lu.solve(rb));
    res.statistic = std::max(res.statistic, 0.0);
    res.p_value = chi_squared_sf(res.statistic, res.df);
    return res;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller
// ---------------------------------------------------------------------------

enum class AdfDeterministic { constant, constant_trend };

struct AdfResult {
    double statistic = 0.0;  ///< t-statistic of the level coefficient
    int lags = 0;            ///< lag count chosen by SBIC
    bool reject_unit_root_5pct = false;
    double critical_1pct = 0.0;
    double critical_5pct = 0.0;
    double critical_10pct = 0.0;
    AdfDeterministic deterministic = AdfDeterministic::constant;
};

namespace detail {

// MacKinnon (2010) response-surface critical values, cv = b0 + b1/T + b2/T^2.
inline double adf_critical(AdfDeterministic det, double level, std::size_t T) {
    struct Coef { double b0, b1, b2; };
    Coef c{};
    if (det == AdfDeterministic::constant) {
        if (level <= 0.01)      c = {-3.43035, -6.5393, -16.786};
        else if (level <= 0.05) c = {-2.86154, -2.8903, -4.234};
        else                    c = {-2.56677, -1.5384, -2.809};
    } else {
        if (level <= 0.01)      c = {-3.95877, -9.0531, -28.428};
        else if (level <= 0.05) c = {-3.41049, -4.3904, -9.036};
        else                    c = {-3.12705, -2.5856, -3.925};
    }
    const double Td = static_cast<double>(T);
    return c.b0 + c.b1 / Td + c.b2 / (Td * Td);
}

struct AdfFit {
    double tstat = 0.0;
    double sbic = 0.0;
    std::size_t nobs = 0;
};

// ADF regression dy_t = c (+ g*t) + phi*y_{t-1} + sum c_i dy_{t-i} + e_t with
// p lagged differences, estimated on rows start_lag.. of the differenced data.
inline AdfFit adf_regression(std::span<const double> y, int p, int start_lag,
                             AdfDeterministic det) {
    const std::size_t T = y.size();
    const std::size_t nd = T - 1;  // number of differences
    const auto first = static_cast<std::size_t>(start_lag);
    if (first >= nd) throw std::invalid_argument("adf_test: series too short for max_lags");
    const std::size_t n = nd - first;

    const int k_det = det == AdfDeterministic::constant ? 1 : 2;
    const int k = k_det + 1 + p;
    if (n <= static_cast<std::size_t>(k))
        throw std::invalid_argument("adf_test: series too short for max_lags");

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd dy(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = first + r;  // index into differences; dy_t = y[t+1]-y[t]
        dy[static_cast<Eigen::Index>(r)] = y[t + 1] - y[t];
        int col = 0;
        X(static_cast<Eigen::Index>(r), col++) = 1.0;
        if (det == AdfDeterministic::constant_trend)
            X(static_cast<Eigen::Index>(r), col++) = static_cast<double>(t + 1);
        X(static_cast<Eigen::Index>(r), col++) = y[t];  // lagged level
        for (int i = 1; i <= p; ++i)
            X(static_cast<Eigen::Index>(r), col++) = y[t - i + 1] - y[t - i];
    }

    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::VectorXd xty = X.transpose() * dy;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    const Eigen::VectorXd coef = ldlt.solve(xty);
    const Eigen::VectorXd resid = dy - X * coef;
    const double ssr = resid.squaredNorm();
    const double sigma2 = ssr / static_cast<double>(n - k);

    const Eigen::MatrixXd xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    const int level_col = k_det;  // position of y_{t-1}
    const double se = std::sqrt(sigma2 * xtx_inv(level_col, level_col));

    AdfFit fit;
    fit.tstat = coef[level_col] / se;
    fit.nobs = n;
    fit.sbic = static_cast<double>(n) * std::log(ssr / static_cast<double>(n)) +
               static_cast<double>(k) * std::log(static_cast<double>(n));
    return fit;
}

}  // namespace detail

/// Augmented Dickey-Fuller unit-root test. The lag count 0..max_lags is
/// selected by SBIC over a common estimation sample, then the chosen model is
/// refit on its own maximal sample. max_lags < 0 applies the Schwert rule
/// floor(12*(T/100)^(1/4)).
inline AdfResult adf_test(std::span<const double> values, int max_lags = -1,
                          AdfDeterministic det = AdfDeterministic::constant) {
    const std::size_t T = values.size();
    if (T < 20) throw std::invalid_argument("adf_test: need at least 20 observations");
    if (max_lags < 0)
        max_lags = static_cast<int>(
            std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
    max_lags = std::min<int>(max_lags, static_cast<int>(T) / 2 - 2);
    max_lags = std::max(max_lags, 0);

    int best_p = 0;
    double best_sbic = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_lags; ++p) {
        const auto fit = detail::adf_regression(values, p, max_lags, det);
        if (fit.sbic < best_sbic) {
            best_sbic = fit.sbic;
            best_p = p;
        }
    }
    const auto fit = detail::adf_regression(values, best_p, best_p, det);

    AdfResult res;
    res.statistic = fit.tstat;
    res.lags = best_p;
    res.deterministic = det;
    res.critical_1pct = detail::adf_critical(det, 0.01, fit.nobs);
    res.critical_5pct = detail::adf_critical(det, 0.05, fit.nobs);
    res.critical_10pct = detail::adf_critical(det, 0.10, fit.nobs);
    res.reject_unit_root_5pct = res.statistic < res.critical_5pct;
    return res;
}

inline AdfResult adf_test(const dist::CharacteristicSeries& series, int max_lags = -1,
                          AdfDeterministic det = AdfDeterministic::constant) {
    return adf_test(std::span<const double>(series.values), max_lags, det);
}

}  // namespace climtrend::reg
