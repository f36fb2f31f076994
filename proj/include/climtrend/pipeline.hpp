#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "climtrend/distributions.hpp"
#include "climtrend/regression.hpp"
#include "climtrend/warming.hpp"

namespace climtrend::warming {

struct Period {
    int first_year = 0;
    int last_year = 0;

    std::string label() const {
        return std::to_string(first_year) + "-" + std::to_string(last_year);
    }
    bool operator==(const Period&) const = default;
};

struct PipelineOptions {
    std::vector<Period> periods;
    int split_year = 0;  ///< acceleration split; 0 -> start of the second period
    std::vector<double> tau_grid = dist::default_tau_grid();
    double level = 0.10;
    int bandwidth = -1;
    AccelMode accel_mode = AccelMode::full_vs_suffix;
    int adf_max_lags = -1;
    std::size_t min_period_years = 20;  ///< shortest period the battery accepts
};

struct TrendRow {
    dist::CharacteristicId id;
    reg::TrendResult result;
};
struct AccelRow {
    dist::CharacteristicId id;
    AccelerationResult result;
};
struct AdfRow {
    dist::CharacteristicId id;
    reg::AdfResult result;
};
struct CotrendRow {
    std::string group;
    reg::WaldResult result;
};
struct SpacingRow {
    std::string label;
    reg::TrendResult result;
};

struct PeriodReport {
    Period period;
    std::vector<AdfRow> adf;
    std::vector<TrendRow> trends;
    std::vector<AccelRow> acceleration;  ///< empty when the split is outside the period
    std::vector<CotrendRow> cotrending;
    std::vector<SpacingRow> spacing;
    TypologyVerdict typology;
    std::vector<AmplificationResult> amplification_inner;
    std::vector<AmplificationResult> amplification_outer;  ///< empty without a reference
};

struct PipelineReport {
    std::string dataset_name;
    std::string reference_name;
    double level = 0.10;
    int split_year = 0;
    std::vector<PeriodReport> periods;
    std::optional<DominanceResult> dominance;  ///< vs reference, first period
};

namespace detail {

inline std::vector<dist::AnnualSample> slice_period(std::span<const dist::AnnualSample> samples,
                                                    const Period& period) {
    std::vector<dist::AnnualSample> out;
    for (const auto& s : samples)
        if (s.year >= period.first_year && s.year <= period.last_year) out.push_back(s);
    std::sort(out.begin(), out.end(),
              [](const dist::AnnualSample& a, const dist::AnnualSample& b) {
                  return a.year < b.year;
              });
    return out;
}

inline const dist::CharacteristicSeries& series_of(
    std::span<const dist::CharacteristicSeries> set, dist::CharacteristicId id) {
    return set[static_cast<std::size_t>(id)];
}

/// The paper's co-trending batteries on the quantile characteristics:
/// lower = tau <= 1/3, medium in (1/3, 2/3), upper > 2/3.
inline std::vector<std::pair<std::string, std::vector<dist::CharacteristicId>>>
cotrend_groups() {
    std::vector<dist::CharacteristicId> lower, medium, upper, all;
    for (auto id : dist::all_characteristics()) {
        if (!dist::is_quantile(id)) continue;
        all.push_back(id);
        const double tau = dist::quantile_tau(id);
        if (tau <= 1.0 / 3.0)
            lower.push_back(id);
        else if (tau < 2.0 / 3.0)
            medium.push_back(id);
        else
            upper.push_back(id);
    }
    auto join = [](std::vector<dist::CharacteristicId> a,
                   const std::vector<dist::CharacteristicId>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return {{"all quantiles", all},
            {"lower quantiles", lower},
            {"medium quantiles", medium},
            {"upper quantiles", upper},
            {"lower-medium quantiles", join(lower, medium)},
            {"medium-upper quantiles", join(medium, upper)},
            {"lower-upper quantiles", join(lower, upper)}};
}

/// Restrict two annual-sample sets to their common years.
inline void intersect_years(std::vector<dist::AnnualSample>& a,
                            std::vector<dist::AnnualSample>& b) {
    auto years_of = [](const std::vector<dist::AnnualSample>& v) {
        std::vector<int> years;
        for (const auto& s : v) years.push_back(s.year);
        return years;
    };
    const auto ya = years_of(a);
    const auto yb = years_of(b);
    std::erase_if(a, [&](const dist::AnnualSample& s) {
        return std::find(yb.begin(), yb.end(), s.year) == yb.end();
    });
    std::erase_if(b, [&](const dist::AnnualSample& s) {
        return std::find(ya.begin(), ya.end(), s.year) == ya.end();
    });
}

}  // namespace detail

/// Runs the full battery per period: ADF pre-tests, trend tests on every
/// characteristic, acceleration at the configured split, the co-trending and
/// spacing tables, the typology verdict, amplification (inner, plus outer
/// against the reference mean when one is supplied), and the dominance table
/// versus the reference over the first period.
inline PipelineReport run_pipeline(std::span<const dist::AnnualSample> samples,
                                   std::span<const dist::AnnualSample> reference,
                                   const PipelineOptions& opts,
                                   std::string dataset_name = "dataset",
                                   std::string reference_name = "reference") {
    if (opts.periods.empty()) throw std::invalid_argument("run_pipeline: no periods configured");
    const bool has_reference = !reference.empty();

    int split = opts.split_year;
    if (split == 0 && opts.periods.size() > 1) split = opts.periods[1].first_year;

    PipelineReport report;
    report.dataset_name = std::move(dataset_name);
    report.reference_name = has_reference ? std::move(reference_name) : "";
    report.level = opts.level;
    report.split_year = split;

    reg::TrendTestOptions topts;
    topts.bandwidth = opts.bandwidth;

    for (const auto& period : opts.periods) {
        if (period.first_year >= period.last_year)
            throw std::invalid_argument("run_pipeline: bad period " + period.label());
        auto sliced = detail::slice_period(samples, period);
        if (sliced.size() < opts.min_period_years)
            throw std::invalid_argument("run_pipeline: period " + period.label() + " has only " +
                                        std::to_string(sliced.size()) + " years (need >= " +
                                        std::to_string(opts.min_period_years) + ")");

        std::vector<dist::AnnualSample> ref_sliced;
        if (has_reference) {
            ref_sliced = detail::slice_period(reference, period);
            detail::intersect_years(sliced, ref_sliced);
            if (sliced.size() < opts.min_period_years)
                throw std::invalid_argument("run_pipeline: period " + period.label() +
                                            " has too few years shared with the reference");
        }

        const auto series = dist::characteristic_series(sliced);

        PeriodReport pr;
        pr.period = period;

        for (auto id : dist::all_characteristics()) {
            const auto& s = detail::series_of(series, id);
            pr.adf.push_back({id, reg::adf_test(s, opts.adf_max_lags)});
            pr.trends.push_back({id, reg::trend_test(s, topts)});
        }

        const bool split_inside = split > period.first_year && split <= period.last_year - 10;
        if (split_inside) {
            AccelerationOptions aopts;
            aopts.mode = opts.accel_mode;
            aopts.bandwidth = opts.bandwidth;
            for (auto id : dist::all_characteristics()) {
                pr.acceleration.push_back(
                    {id, acceleration_test(detail::series_of(series, id), split, aopts)});
            }
        }

        for (const auto& [name, ids] : detail::cotrend_groups()) {
            std::vector<dist::CharacteristicSeries> group;
            for (auto id : ids) group.push_back(detail::series_of(series, id));
            pr.cotrending.push_back(
                {name, reg::multi_trend_wald(group, opts.bandwidth, "equal slopes: " + name)});
        }

        using Id = dist::CharacteristicId;
        pr.spacing.push_back({"q50-q05", reg::spacing_test(detail::series_of(series, Id::q50),
                                                           detail::series_of(series, Id::q05),
                                                           topts)});
        pr.spacing.push_back({"q95-q50", reg::spacing_test(detail::series_of(series, Id::q95),
                                                           detail::series_of(series, Id::q50),
                                                           topts)});
        pr.spacing.push_back({"q95-q05", reg::spacing_test(detail::series_of(series, Id::q95),
                                                           detail::series_of(series, Id::q05),
                                                           topts)});
        pr.spacing.push_back(
            {"q75-q25 (iqr)", reg::trend_test(detail::series_of(series, Id::iqr), topts)});

        pr.typology = classify_typology(typology_inputs(series, opts.bandwidth), opts.level);

        const auto& mean_series = detail::series_of(series, Id::mean);
        std::vector<dist::CharacteristicSeries> ref_series;
        if (has_reference) ref_series = dist::characteristic_series(ref_sliced);
        for (auto id : dist::all_characteristics()) {
            if (!dist::is_quantile(id)) continue;
            pr.amplification_inner.push_back(amplification_test(
                detail::series_of(series, id), mean_series, AmplificationMode::inner,
                opts.bandwidth));
            if (has_reference) {
                pr.amplification_outer.push_back(amplification_test(
                    detail::series_of(series, id), detail::series_of(ref_series, Id::mean),
                    AmplificationMode::outer, opts.bandwidth));
            }
        }

        report.periods.push_back(std::move(pr));
    }

    if (has_reference) {
        auto a = detail::slice_period(samples, opts.periods.front());
        auto b = detail::slice_period(reference, opts.periods.front());
        detail::intersect_years(a, b);
        const auto qa = dist::quantile_series_grid(a, opts.tau_grid);
        const auto qb = dist::quantile_series_grid(b, opts.tau_grid);
        report.dominance =
            dominance_test(qa, qb, opts.tau_grid, opts.level, opts.bandwidth);
    }
    return report;
}

}  // namespace climtrend::warming
