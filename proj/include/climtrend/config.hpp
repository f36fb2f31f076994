#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "climtrend/ingest.hpp"
#include "climtrend/pipeline.hpp"

namespace climtrend::config {

/// Bad or missing configuration (as opposed to bad data).
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    std::string name;
    std::filesystem::path path;
    ingest::FormatSpec format;
    ingest::PanelSpec panel;
    std::string station_id;  ///< filter for single-station-daily files with several stations
};

struct RunConfig {
    std::optional<DatasetConfig> dataset;
    std::optional<DatasetConfig> reference;
    std::vector<warming::Period> periods;
    int split_year = 0;
    std::vector<double> tau_grid = dist::default_tau_grid();
    double level = 0.10;
    int bandwidth = -1;
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
};

namespace detail {

using json = nlohmann::json;

inline ingest::FormatSpec format_from_json(const json& j) {
    ingest::FormatSpec fmt;
    if (j.contains("delimiter")) {
        const std::string d = j.at("delimiter");
        if (d.size() != 1) throw ConfigError("format.delimiter must be a single character");
        fmt.delimiter = d[0];
    }
    fmt.has_header = j.value("has_header", fmt.has_header);
    if (j.contains("expected_header"))
        fmt.expected_header = j.at("expected_header").get<std::vector<std::string>>();
    if (j.contains("columns")) {
        const auto& cols = j.at("columns");
        fmt.station_col = cols.value("station_id", fmt.station_col);
        fmt.date_col = cols.value("date", fmt.date_col);
        fmt.tmin_col = cols.value("tmin", fmt.tmin_col);
        fmt.tmax_col = cols.value("tmax", fmt.tmax_col);
        fmt.tavg_col = cols.value("tavg", fmt.tavg_col);
    }
    fmt.date_format = j.value("date_format", fmt.date_format);
    if (j.contains("na_values"))
        fmt.na_values = j.at("na_values").get<std::vector<std::string>>();
    if (j.contains("granularity")) {
        const std::string g = j.at("granularity");
        if (g == "daily")
            fmt.granularity = ingest::Granularity::daily;
        else if (g == "monthly")
            fmt.granularity = ingest::Granularity::monthly;
        else
            throw ConfigError("format.granularity must be 'daily' or 'monthly'");
    }
    return fmt;
}

inline DatasetConfig dataset_from_json(const json& j, const std::filesystem::path& base_dir) {
    DatasetConfig ds;
    ds.name = j.value("name", "dataset");
    if (!j.contains("path")) throw ConfigError("dataset '" + ds.name + "' has no path");
    ds.path = j.at("path").get<std::string>();
    if (ds.path.is_relative()) ds.path = base_dir / ds.path;
    if (j.contains("format")) ds.format = format_from_json(j.at("format"));

    if (!j.contains("start_year") || !j.contains("end_year"))
        throw ConfigError("dataset '" + ds.name + "' needs start_year and end_year");
    ds.panel.start_year = j.at("start_year");
    ds.panel.end_year = j.at("end_year");
    if (ds.panel.start_year >= ds.panel.end_year)
        throw ConfigError("dataset '" + ds.name + "': start_year must precede end_year");
    ds.panel.coverage = j.value("coverage", ds.panel.coverage);
    if (ds.panel.coverage <= 0.0 || ds.panel.coverage > 1.0)
        throw ConfigError("dataset '" + ds.name + "': coverage must be in (0,1]");

    const std::string mode = j.value("mode", "cross-sectional-monthly");
    if (mode == "cross-sectional-monthly")
        ds.panel.mode = ingest::PanelMode::cross_sectional_monthly;
    else if (mode == "single-station-daily")
        ds.panel.mode = ingest::PanelMode::single_station_daily;
    else
        throw ConfigError("dataset '" + ds.name + "': unknown mode '" + mode + "'");

    const std::string rule = j.value("panel_rule", "strict-station");
    if (rule == "strict-station")
        ds.panel.rule = ingest::PanelRule::strict_station;
    else if (rule == "station-month")
        ds.panel.rule = ingest::PanelRule::station_month;
    else
        throw ConfigError("dataset '" + ds.name + "': unknown panel_rule '" + rule + "'");

    ds.station_id = j.value("station_id", "");
    return ds;
}

}  // namespace detail

/// Loads a run configuration from a JSON file. Relative dataset paths resolve
/// against the config file's directory.
inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }

    const auto base_dir = path.has_parent_path() ? path.parent_path()
                                                 : std::filesystem::path(".");
    RunConfig cfg;
    try {
        if (j.contains("dataset"))
            cfg.dataset = detail::dataset_from_json(j.at("dataset"), base_dir);
        if (j.contains("reference"))
            cfg.reference = detail::dataset_from_json(j.at("reference"), base_dir);
        if (j.contains("periods")) {
            for (const auto& p : j.at("periods")) {
                if (!p.is_array() || p.size() != 2)
                    throw ConfigError("periods entries must be [first_year, last_year]");
                cfg.periods.push_back({p[0].get<int>(), p[1].get<int>()});
            }
        }
        cfg.split_year = j.value("split_year", cfg.split_year);
        if (j.contains("tau_grid")) {
            cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
            for (double tau : cfg.tau_grid)
                if (!(tau > 0.0 && tau < 1.0))
                    throw ConfigError("tau_grid values must be in (0,1)");
        }
        cfg.level = j.value("level", cfg.level);
        if (!(cfg.level > 0.0 && cfg.level < 1.0))
            throw ConfigError("level must be in (0,1)");
        if (j.contains("bandwidth") && !j.at("bandwidth").is_null()) {
            cfg.bandwidth = j.at("bandwidth");
            if (cfg.bandwidth < 0) throw ConfigError("bandwidth must be >= 0");
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("out")) {
            std::filesystem::path out = j.at("out").get<std::string>();
            cfg.out = out.is_relative() ? base_dir / out : out;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

struct LoadedDataset {
    std::string name;
    std::vector<dist::AnnualSample> samples;
    std::vector<dist::CharacteristicSeries> series;
    ingest::ParseResult parse;
    std::size_t units_per_year = 0;            ///< cross-sectional mode
    std::vector<std::string> panel_stations;   ///< cross-sectional mode
    std::size_t filtered_rows = 0;             ///< records not used by any sample
};

/// Full ingestion path for one configured dataset: parse, aggregate, select,
/// and compute the characteristic series.
inline LoadedDataset load_dataset(const DatasetConfig& ds) {
    LoadedDataset out;
    out.name = ds.name;
    out.parse = ingest::parse_station_file(ds.path, ds.format);

    std::size_t contributing = 0;
    if (ds.panel.mode == ingest::PanelMode::cross_sectional_monthly) {
        ingest::MonthlyBuildResult monthly;
        if (ds.format.granularity == ingest::Granularity::monthly)
            monthly = ingest::station_month_units_from_monthly(out.parse.records);
        else
            monthly = ingest::build_station_month_units(out.parse.records, ds.panel.coverage);
        const auto panel = ingest::select_balanced_panel(monthly.units, ds.panel);
        out.samples = panel.samples;
        out.units_per_year = panel.units_per_year;
        out.panel_stations = panel.stations;
        std::set<std::pair<std::string, int>> cells(panel.kept_cells.begin(),
                                                    panel.kept_cells.end());
        for (const auto& r : out.parse.records) {
            if (r.date.year < ds.panel.start_year || r.date.year > ds.panel.end_year) continue;
            if (cells.count({r.station_id, r.date.month})) ++contributing;
        }
    } else {
        auto records = out.parse.records;
        if (!ds.station_id.empty())
            std::erase_if(records, [&](const ingest::StationRecord& r) {
                return r.station_id != ds.station_id;
            });
        const auto daily = ingest::assemble_daily_annual_samples(records, ds.panel);
        out.samples = daily.samples;
        std::set<int> kept_years;
        for (const auto& s : out.samples) kept_years.insert(s.year);
        for (const auto& r : records)
            if (kept_years.count(r.date.year)) ++contributing;
    }

    // every parsed row either contributes to a sample or is filtered out
    out.filtered_rows = out.parse.records.size() - contributing;
    out.series = dist::characteristic_series(out.samples);
    return out;
}

}  // namespace climtrend::config
