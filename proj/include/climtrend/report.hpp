#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "climtrend/distributions.hpp"
#include "climtrend/dgp.hpp"
#include "climtrend/ingest.hpp"
#include "climtrend/pipeline.hpp"

namespace climtrend::report {

using json = nlohmann::ordered_json;

/// Fixed numeric formatting so identical runs produce byte-identical files.
inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline void write_table(const std::filesystem::path& path, const Table& table,
                        char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << delimiter;
            out << fields[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
}

// ---------------------------------------------------------------------------
// ingest exports
// ---------------------------------------------------------------------------

inline Table characteristic_matrix(std::span<const dist::CharacteristicSeries> series) {
    Table t;
    t.header.push_back("year");
    for (auto id : dist::all_characteristics()) t.header.emplace_back(dist::to_string(id));
    if (series.empty()) return t;
    const auto& years = series.front().years;
    for (std::size_t r = 0; r < years.size(); ++r) {
        std::vector<std::string> row;
        row.push_back(std::to_string(years[r]));
        for (auto id : dist::all_characteristics())
            row.push_back(fmt_num(series[static_cast<std::size_t>(id)].values[r]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table rejects_table(std::span<const ingest::RejectedRow> rejects) {
    Table t;
    t.header = {"line_number", "reason", "line"};
    for (const auto& r : rejects)
        t.rows.push_back({std::to_string(r.line_number), r.reason, r.line});
    return t;
}

// ---------------------------------------------------------------------------
// analysis tables (column layouts mirror the paper's tables)
// ---------------------------------------------------------------------------

inline Table trend_acceleration_table(const warming::PipelineReport& rep) {
    Table t;
    t.header = {"characteristic"};
    for (const auto& p : rep.periods) {
        t.header.push_back("beta_" + p.period.label());
        t.header.push_back("p_" + p.period.label());
    }
    t.header.push_back("accel_t");
    t.header.push_back("accel_p");

    const auto* accel_period = &rep.periods.front();
    for (const auto& p : rep.periods)
        if (!p.acceleration.empty()) {
            accel_period = &p;
            break;
        }

    for (std::size_t i = 0; i < dist::kNumCharacteristics; ++i) {
        std::vector<std::string> row;
        row.emplace_back(dist::to_string(rep.periods.front().trends[i].id));
        for (const auto& p : rep.periods) {
            row.push_back(fmt_num(p.trends[i].result.beta));
            row.push_back(fmt_num(p.trends[i].result.p_value));
        }
        if (!accel_period->acceleration.empty()) {
            row.push_back(fmt_num(accel_period->acceleration[i].result.t_diff));
            row.push_back(fmt_num(accel_period->acceleration[i].result.p_one_sided));
        } else {
            row.emplace_back("");
            row.emplace_back("");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table cotrending_table(const warming::PeriodReport& period) {
    Table t;
    t.header = {"section", "hypothesis", "statistic", "df", "p_value"};
    for (const auto& row : period.cotrending)
        t.rows.push_back({"wald", row.group, fmt_num(row.result.statistic),
                          std::to_string(row.result.df), fmt_num(row.result.p_value)});
    for (const auto& row : period.spacing)
        t.rows.push_back(
            {"spacing", row.label, fmt_num(row.result.beta), "", fmt_num(row.result.p_value)});
    return t;
}

inline Table amplification_table(const warming::PeriodReport& period) {
    Table t;
    t.header = {"quantile", "inner_slope", "inner_p", "outer_slope", "outer_p"};
    for (std::size_t i = 0; i < period.amplification_inner.size(); ++i) {
        const auto& inner = period.amplification_inner[i];
        std::vector<std::string> row{std::string(dist::to_string(inner.id)),
                                     fmt_num(inner.slope_on_mean), fmt_num(inner.p_one_sided)};
        if (i < period.amplification_outer.size()) {
            row.push_back(fmt_num(period.amplification_outer[i].slope_on_mean));
            row.push_back(fmt_num(period.amplification_outer[i].p_one_sided));
        } else {
            row.emplace_back("");
            row.emplace_back("");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table adf_table(const warming::PeriodReport& period) {
    Table t;
    t.header = {"characteristic", "statistic", "lags", "critical_5pct", "reject_unit_root_5pct"};
    for (const auto& row : period.adf)
        t.rows.push_back({std::string(dist::to_string(row.id)), fmt_num(row.result.statistic),
                          std::to_string(row.result.lags), fmt_num(row.result.critical_5pct),
                          row.result.reject_unit_root_5pct ? "yes" : "no"});
    return t;
}

inline Table typology_table(const warming::PipelineReport& rep) {
    Table t;
    t.header = {"period", "label", "low_confidence", "all_quantiles_wald_p", "iqr_beta",
                "iqr_p", "q95_q05_beta", "q95_q05_p", "level"};
    for (const auto& p : rep.periods) {
        const auto& e = p.typology.evidence;
        t.rows.push_back({p.period.label(), std::string(warming::to_string(p.typology.label)),
                          p.typology.low_confidence ? "yes" : "no",
                          fmt_num(e.all_quantiles_wald.p_value), fmt_num(e.iqr_spacing.beta),
                          fmt_num(e.iqr_spacing.p_two_sided()), fmt_num(e.q95_q05_spacing.beta),
                          fmt_num(e.q95_q05_spacing.p_two_sided()),
                          fmt_num(p.typology.level)});
    }
    return t;
}

inline Table dominance_table(const warming::DominanceResult& dom) {
    Table t;
    t.header = {"tau", "beta", "t_stat", "p_two_sided"};
    for (const auto& row : dom.rows)
        t.rows.push_back({fmt_num(row.tau), fmt_num(row.beta), fmt_num(row.t_stat),
                          fmt_num(row.p_two_sided)});
    return t;
}

namespace detail {

inline std::string join_ids(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : " ") + s;
    return out.empty() ? "-" : out;
}

}  // namespace detail

/// One row per period: typology plus the significant accelerations,
/// amplifications and the dominance verdict, as in the paper's summary.
inline Table summary_table(const warming::PipelineReport& rep) {
    Table t;
    t.header = {"dataset", "period", "type", "accelerated", "amplified_inner",
                "amplified_outer", "dominance"};
    for (const auto& p : rep.periods) {
        std::vector<std::string> accelerated, inner, outer;
        for (const auto& a : p.acceleration)
            if (a.result.p_one_sided < rep.level)
                accelerated.emplace_back(dist::to_string(a.id));
        for (const auto& a : p.amplification_inner)
            if (a.p_one_sided < rep.level) inner.emplace_back(dist::to_string(a.id));
        for (const auto& a : p.amplification_outer)
            if (a.p_one_sided < rep.level) outer.emplace_back(dist::to_string(a.id));
        std::string dominance = "-";
        if (rep.dominance && &p == &rep.periods.front())
            dominance = std::string(warming::to_string(rep.dominance->verdict));
        t.rows.push_back({rep.dataset_name, p.period.label(),
                          std::string(warming::to_string(p.typology.label)),
                          detail::join_ids(accelerated), detail::join_ids(inner),
                          detail::join_ids(outer), dominance});
    }
    return t;
}

// ---------------------------------------------------------------------------
// plot-ready exports
// ---------------------------------------------------------------------------

/// Heatmap cells: trend beta per characteristic, one column per
/// (dataset, period) pair.
inline Table heatmap_table(std::span<const warming::PipelineReport> reports) {
    Table t;
    t.header = {"characteristic"};
    for (const auto& rep : reports)
        for (const auto& p : rep.periods)
            t.header.push_back(rep.dataset_name + ":" + p.period.label());
    for (std::size_t i = 0; i < dist::kNumCharacteristics; ++i) {
        std::vector<std::string> row;
        row.emplace_back(
            dist::to_string(static_cast<dist::CharacteristicId>(i)));
        for (const auto& rep : reports)
            for (const auto& p : rep.periods) row.push_back(fmt_num(p.trends[i].result.beta));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Side-by-side trend-intensity bars over the first period of each dataset.
inline Table bars_table(std::span<const warming::PipelineReport> reports) {
    Table t;
    t.header = {"characteristic"};
    for (const auto& rep : reports) t.header.push_back(rep.dataset_name);
    for (std::size_t i = 0; i < dist::kNumCharacteristics; ++i) {
        std::vector<std::string> row;
        row.emplace_back(dist::to_string(static_cast<dist::CharacteristicId>(i)));
        for (const auto& rep : reports)
            row.push_back(fmt_num(rep.periods.front().trends[i].result.beta));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table rate_check_table(std::span<const sim::RateCheckResult> checks) {
    Table t;
    t.header = {"check", "lengths", "medians", "fitted_exponent", "target", "tolerance",
                "pass"};
    for (const auto& c : checks) {
        std::string lengths, medians;
        for (std::size_t i = 0; i < c.lengths.size(); ++i) {
            lengths += (i ? " " : "") + std::to_string(c.lengths[i]);
            medians += (i ? " " : "") + fmt_num(c.medians[i]);
        }
        t.rows.push_back({c.label, lengths, medians, fmt_num(c.fitted_exponent),
                          fmt_num(c.target_exponent), fmt_num(c.tolerance),
                          c.pass ? "yes" : "no"});
    }
    return t;
}

// ---------------------------------------------------------------------------
// results.json round trip
// ---------------------------------------------------------------------------

namespace detail {

inline json trend_to_json(const reg::TrendResult& r) {
    return json{{"alpha", r.alpha},
                {"beta", r.beta},
                {"se_hac", r.se_hac},
                {"t_stat", r.t_stat},
                {"p_value", r.p_value},
                {"sidedness",
                 r.sidedness == reg::Sidedness::two_sided ? "two-sided" : "one-sided-greater"},
                {"T", r.T},
                {"bandwidth", r.bandwidth},
                {"degenerate", r.degenerate}};
}

inline reg::TrendResult trend_from_json(const json& j) {
    reg::TrendResult r;
    r.alpha = j.at("alpha");
    r.beta = j.at("beta");
    r.se_hac = j.at("se_hac");
    r.t_stat = j.at("t_stat");
    r.p_value = j.at("p_value");
    r.sidedness = j.at("sidedness") == "two-sided" ? reg::Sidedness::two_sided
                                                   : reg::Sidedness::one_sided_greater;
    r.T = j.at("T");
    r.bandwidth = j.at("bandwidth");
    r.degenerate = j.at("degenerate");
    return r;
}

}  // namespace detail

inline json to_json(const warming::PipelineReport& rep) {
    json out;
    out["dataset"] = rep.dataset_name;
    out["reference"] = rep.reference_name;
    out["level"] = rep.level;
    out["split_year"] = rep.split_year;
    out["periods"] = json::array();
    for (const auto& p : rep.periods) {
        json jp;
        jp["first_year"] = p.period.first_year;
        jp["last_year"] = p.period.last_year;
        jp["adf"] = json::array();
        for (const auto& row : p.adf)
            jp["adf"].push_back({{"characteristic", dist::to_string(row.id)},
                                 {"statistic", row.result.statistic},
                                 {"lags", row.result.lags},
                                 {"critical_5pct", row.result.critical_5pct},
                                 {"reject_5pct", row.result.reject_unit_root_5pct}});
        jp["trends"] = json::array();
        for (const auto& row : p.trends)
            jp["trends"].push_back({{"characteristic", dist::to_string(row.id)},
                                    {"result", detail::trend_to_json(row.result)}});
        jp["acceleration"] = json::array();
        for (const auto& row : p.acceleration)
            jp["acceleration"].push_back({{"characteristic", dist::to_string(row.id)},
                                          {"beta_full", row.result.beta_full},
                                          {"beta_late", row.result.beta_late},
                                          {"t_diff", row.result.t_diff},
                                          {"p_one_sided", row.result.p_one_sided},
                                          {"split_year", row.result.split_year}});
        jp["cotrending"] = json::array();
        for (const auto& row : p.cotrending)
            jp["cotrending"].push_back({{"group", row.group},
                                        {"statistic", row.result.statistic},
                                        {"df", row.result.df},
                                        {"p_value", row.result.p_value}});
        jp["spacing"] = json::array();
        for (const auto& row : p.spacing)
            jp["spacing"].push_back(
                {{"label", row.label}, {"result", detail::trend_to_json(row.result)}});
        jp["typology"] = {{"label", warming::to_string(p.typology.label)},
                          {"low_confidence", p.typology.low_confidence},
                          {"level", p.typology.level}};
        auto amp_json = [](const warming::AmplificationResult& a) {
            return json{{"characteristic", dist::to_string(a.id)},
                        {"slope_on_mean", a.slope_on_mean},
                        {"se_hac", a.se_hac},
                        {"t_stat", a.t_stat},
                        {"p_one_sided", a.p_one_sided}};
        };
        jp["amplification_inner"] = json::array();
        for (const auto& a : p.amplification_inner) jp["amplification_inner"].push_back(amp_json(a));
        jp["amplification_outer"] = json::array();
        for (const auto& a : p.amplification_outer) jp["amplification_outer"].push_back(amp_json(a));
        out["periods"].push_back(std::move(jp));
    }
    if (rep.dominance) {
        json jd;
        jd["verdict"] = warming::to_string(rep.dominance->verdict);
        jd["level"] = rep.dominance->level;
        jd["rows"] = json::array();
        for (const auto& row : rep.dominance->rows)
            jd["rows"].push_back({{"tau", row.tau},
                                  {"beta", row.beta},
                                  {"t_stat", row.t_stat},
                                  {"p_two_sided", row.p_two_sided}});
        out["dominance"] = std::move(jd);
    }
    return out;
}

/// Rebuilds the slice of the report the exports need (dataset name, periods,
/// trend and acceleration rows, typology, dominance).
inline warming::PipelineReport report_from_json(const json& j) {
    warming::PipelineReport rep;
    rep.dataset_name = j.at("dataset");
    rep.reference_name = j.value("reference", "");
    rep.level = j.at("level");
    rep.split_year = j.at("split_year");
    for (const auto& jp : j.at("periods")) {
        warming::PeriodReport p;
        p.period = {jp.at("first_year"), jp.at("last_year")};
        for (const auto& row : jp.at("trends")) {
            const auto id = dist::characteristic_from_string(
                row.at("characteristic").get<std::string>());
            if (!id) throw std::runtime_error("results.json: unknown characteristic");
            p.trends.push_back({*id, detail::trend_from_json(row.at("result"))});
        }
        for (const auto& row : jp.at("acceleration")) {
            const auto id = dist::characteristic_from_string(
                row.at("characteristic").get<std::string>());
            if (!id) throw std::runtime_error("results.json: unknown characteristic");
            warming::AccelerationResult a;
            a.beta_full = row.at("beta_full");
            a.beta_late = row.at("beta_late");
            a.t_diff = row.at("t_diff");
            a.p_one_sided = row.at("p_one_sided");
            a.split_year = row.at("split_year");
            p.acceleration.push_back({*id, a});
        }
        const auto& jt = jp.at("typology");
        p.typology.label = jt.at("label") == "W0"   ? warming::WarmingType::W0
                           : jt.at("label") == "W1" ? warming::WarmingType::W1
                           : jt.at("label") == "W2" ? warming::WarmingType::W2
                                                    : warming::WarmingType::W3;
        p.typology.low_confidence = jt.at("low_confidence");
        p.typology.level = jt.at("level");
        rep.periods.push_back(std::move(p));
    }
    if (j.contains("dominance")) {
        warming::DominanceResult dom;
        const auto& jd = j.at("dominance");
        dom.level = jd.at("level");
        const std::string v = jd.at("verdict");
        dom.verdict = v == "A-dominates"       ? warming::DominanceVerdict::a_dominates
                      : v == "B-dominates"     ? warming::DominanceVerdict::b_dominates
                      : v == "partial-A-upper" ? warming::DominanceVerdict::partial_a_upper
                      : v == "partial-B-lower" ? warming::DominanceVerdict::partial_b_lower
                                               : warming::DominanceVerdict::none;
        for (const auto& row : jd.at("rows"))
            dom.rows.push_back(
                {row.at("tau"), row.at("beta"), row.at("t_stat"), row.at("p_two_sided")});
        rep.dominance = std::move(dom);
    }
    return rep;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return json::parse(in);
}

}  // namespace climtrend::report
