#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace climtrend::dist {

/// One year's empirical temperature distribution: the cross-sectional set of
/// station-month values (or the daily values of a single station).
struct AnnualSample {
    int year = 0;
    std::vector<double> values;

    std::size_t n() const { return values.size(); }
};

/// The closed set of distributional characteristics tracked as time series.
enum class CharacteristicId {
    mean,
    max,
    min,
    std_dev,
    iqr,
    rank,
    kur,
    skw,
    q05,
    q10,
    q20,
    q30,
    q40,
    q50,
    q60,
    q70,
    q80,
    q90,
    q95,
};

inline constexpr std::size_t kNumCharacteristics = 19;

inline constexpr std::array<CharacteristicId, kNumCharacteristics> all_characteristics() {
    return {CharacteristicId::mean, CharacteristicId::max,  CharacteristicId::min,
            CharacteristicId::std_dev, CharacteristicId::iqr, CharacteristicId::rank,
            CharacteristicId::kur,  CharacteristicId::skw,  CharacteristicId::q05,
            CharacteristicId::q10,  CharacteristicId::q20,  CharacteristicId::q30,
            CharacteristicId::q40,  CharacteristicId::q50,  CharacteristicId::q60,
            CharacteristicId::q70,  CharacteristicId::q80,  CharacteristicId::q90,
            CharacteristicId::q95};
}

inline std::string_view to_string(CharacteristicId id) {
    switch (id) {
        case CharacteristicId::mean: return "mean";
        case CharacteristicId::max: return "max";
        case CharacteristicId::min: return "min";
        case CharacteristicId::std_dev: return "std";
        case CharacteristicId::iqr: return "iqr";
        case CharacteristicId::rank: return "rank";
        case CharacteristicId::kur: return "kur";
        case CharacteristicId::skw: return "skw";
        case CharacteristicId::q05: return "q05";
        case CharacteristicId::q10: return "q10";
        case CharacteristicId::q20: return "q20";
        case CharacteristicId::q30: return "q30";
        case CharacteristicId::q40: return "q40";
        case CharacteristicId::q50: return "q50";
        case CharacteristicId::q60: return "q60";
        case CharacteristicId::q70: return "q70";
        case CharacteristicId::q80: return "q80";
        case CharacteristicId::q90: return "q90";
        case CharacteristicId::q95: return "q95";
    }
    return "?";
}

inline std::optional<CharacteristicId> characteristic_from_string(std::string_view name) {
    for (auto id : all_characteristics()) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

/// True for the q05..q95 members.
inline bool is_quantile(CharacteristicId id) {
    return static_cast<int>(id) >= static_cast<int>(CharacteristicId::q05);
}

/// Probability level of a quantile characteristic.
inline double quantile_tau(CharacteristicId id) {
    switch (id) {
        case CharacteristicId::q05: return 0.05;
        case CharacteristicId::q10: return 0.10;
        case CharacteristicId::q20: return 0.20;
        case CharacteristicId::q30: return 0.30;
        case CharacteristicId::q40: return 0.40;
        case CharacteristicId::q50: return 0.50;
        case CharacteristicId::q60: return 0.60;
        case CharacteristicId::q70: return 0.70;
        case CharacteristicId::q80: return 0.80;
        case CharacteristicId::q90: return 0.90;
        case CharacteristicId::q95: return 0.95;
        default:
            throw std::invalid_argument("quantile_tau: not a quantile characteristic");
    }
}

/// The quantile characteristics in grid order.
inline std::vector<double> default_tau_grid() {
    return {0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95};
}

/// Empirical quantile of already-sorted data, linear interpolation of order
/// statistics at plotting position h = (n-1)*tau + 1.
inline double quantile_sorted(std::span<const double> sorted, double tau) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("quantile: tau must be in (0,1)");
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * tau;  // zero-based position
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Empirical quantile of unsorted data.
inline double quantile(std::span<const double> values, double tau) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, tau);
}

inline double quantile(const AnnualSample& sample, double tau) {
    return quantile(std::span<const double>(sample.values), tau);
}

/// All characteristic values of one sample, indexed by CharacteristicId.
using CharacteristicValues = std::array<double, kNumCharacteristics>;

inline double get(const CharacteristicValues& v, CharacteristicId id) {
    return v[static_cast<std::size_t>(id)];
}

/// Computes every characteristic of one annual sample.
///
/// mean/max/min are the sample moments and extremes; std uses the n-1
/// denominator; iqr is q75-q25; rank is max-min; skw and kur are the
/// standardized third and fourth central moments with n denominators, kur
/// reported as excess. Quantiles follow quantile_sorted. A zero-variance
/// sample yields skw = kur = 0.
inline CharacteristicValues characteristics(const AnnualSample& sample) {
    const std::size_t n = sample.n();
    if (n < 4) throw std::invalid_argument("characteristics: need at least 4 observations");

    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());

    double sum = 0.0;
    for (double v : sorted) sum += v;
    const double mean = sum / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double var_unbiased = m2 / static_cast<double>(n - 1);
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    const double skw = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    const double kur = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;

    const double q25 = quantile_sorted(sorted, 0.25);
    const double q75 = quantile_sorted(sorted, 0.75);

    CharacteristicValues out{};
    auto set = [&out](CharacteristicId id, double v) { out[static_cast<std::size_t>(id)] = v; };
    set(CharacteristicId::mean, mean);
    set(CharacteristicId::max, sorted.back());
    set(CharacteristicId::min, sorted.front());
    set(CharacteristicId::std_dev, std::sqrt(var_unbiased));
    set(CharacteristicId::iqr, q75 - q25);
    set(CharacteristicId::rank, sorted.back() - sorted.front());
    set(CharacteristicId::kur, kur);
    set(CharacteristicId::skw, skw);
    for (auto id : all_characteristics()) {
        if (is_quantile(id)) set(id, quantile_sorted(sorted, quantile_tau(id)));
    }
    return out;
}

/// One characteristic tracked across years.
struct CharacteristicSeries {
    CharacteristicId id = CharacteristicId::mean;
    std::vector<int> years;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Stacks per-year characteristics into one series per CharacteristicId,
/// all aligned on the same (strictly increasing) year axis.
inline std::vector<CharacteristicSeries> characteristic_series(
    std::span<const AnnualSample> samples) {
    if (samples.size() < 10)
        throw std::invalid_argument("characteristic_series: need at least 10 years");

    std::vector<const AnnualSample*> ordered;
    ordered.reserve(samples.size());
    for (const auto& s : samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const AnnualSample* a, const AnnualSample* b) { return a->year < b->year; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i]->year == ordered[i - 1]->year)
            throw std::invalid_argument("characteristic_series: duplicate year " +
                                        std::to_string(ordered[i]->year));
    }

    std::vector<CharacteristicSeries> out(kNumCharacteristics);
    for (auto id : all_characteristics()) {
        auto& s = out[static_cast<std::size_t>(id)];
        s.id = id;
        s.years.reserve(ordered.size());
        s.values.reserve(ordered.size());
    }
    for (const AnnualSample* sample : ordered) {
        const CharacteristicValues vals = characteristics(*sample);
        for (auto id : all_characteristics()) {
            auto& s = out[static_cast<std::size_t>(id)];
            s.years.push_back(sample->year);
            s.values.push_back(get(vals, id));
        }
    }
    return out;
}

/// Quantile time series for a whole tau grid, sorting each year once.
inline std::vector<CharacteristicSeries> quantile_series_grid(
    std::span<const AnnualSample> samples, std::span<const double> taus) {
    std::vector<const AnnualSample*> ordered;
    ordered.reserve(samples.size());
    for (const auto& s : samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const AnnualSample* a, const AnnualSample* b) { return a->year < b->year; });

    std::vector<CharacteristicSeries> out(taus.size());
    for (auto& s : out) s.id = CharacteristicId::q50;
    for (const AnnualSample* sample : ordered) {
        std::vector<double> sorted = sample->values;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < taus.size(); ++i) {
            out[i].years.push_back(sample->year);
            out[i].values.push_back(quantile_sorted(sorted, taus[i]));
        }
    }
    return out;
}

/// Quantile time series at an arbitrary tau, one value per year.
inline CharacteristicSeries quantile_series(std::span<const AnnualSample> samples, double tau) {
    const double taus[1] = {tau};
    return quantile_series_grid(samples, taus)[0];
}

}  // namespace climtrend::dist
