#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "climtrend/distributions.hpp"

namespace climtrend::ingest {

/// Data problems (unreadable files, header mismatches, reject floods).
class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
};

inline bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

inline int days_in_year(int year) { return is_leap_year(year) ? 366 : 365; }

inline bool valid_date(const Date& d) {
    return d.year >= 1 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= days_in_month(d.year, d.month);
}

/// One raw station observation. Absent temperatures are NaN.
struct StationRecord {
    std::string station_id;
    Date date;
    double tmin = std::numeric_limits<double>::quiet_NaN();
    double tmax = std::numeric_limits<double>::quiet_NaN();
    double tavg = std::numeric_limits<double>::quiet_NaN();
};

struct RejectedRow {
    std::size_t line_number = 0;  ///< 1-based, counting every line in the file
    std::string line;
    std::string reason;
};

struct ParseResult {
    std::vector<StationRecord> records;
    std::vector<RejectedRow> rejects;
    std::size_t data_rows = 0;  ///< rows considered (header excluded)
};

enum class Granularity { daily, monthly };

/// Declared column layout of a delimited station file. Column indices are
/// 0-based; -1 marks a column as absent.
struct FormatSpec {
    char delimiter = ',';
    bool has_header = true;
    std::vector<std::string> expected_header;  ///< verified against the file when set
    int station_col = 0;
    int date_col = 1;
    int tmin_col = 2;
    int tmax_col = 3;
    int tavg_col = 4;
    std::string date_format = "%Y-%m-%d";  ///< %Y %m %d plus literal separators
    std::vector<std::string> na_values = {"", "NA", "NaN"};
    Granularity granularity = Granularity::daily;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) fields.push_back(field);
    if (!line.empty() && line.back() == delimiter) fields.emplace_back();
    return fields;
}

inline std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline std::optional<Date> parse_date(const std::string& text, const std::string& format) {
    Date d{1, 1, 1};
    bool have_day = false;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            const char code = format[++f];
            const std::size_t width = code == 'Y' ? 4 : 2;
            if (pos + width > text.size()) return std::nullopt;
            int value = 0;
            for (std::size_t i = 0; i < width; ++i) {
                const char c = text[pos + i];
                if (c < '0' || c > '9') return std::nullopt;
                value = value * 10 + (c - '0');
            }
            pos += width;
            switch (code) {
                case 'Y': d.year = value; break;
                case 'm': d.month = value; break;
                case 'd': d.day = value; have_day = true; break;
                default: return std::nullopt;
            }
        } else {
            if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
            ++pos;
        }
    }
    if (pos != text.size()) return std::nullopt;
    if (!have_day) d.day = 1;
    if (!valid_date(d)) return std::nullopt;
    return d;
}

inline bool is_na(const std::string& value, const FormatSpec& fmt) {
    for (const auto& na : fmt.na_values)
        if (value == na) return true;
    return false;
}

// parses a temperature field; NaN for declared NA markers, nullopt on garbage
inline std::optional<double> parse_temp(const std::string& raw, const FormatSpec& fmt) {
    const std::string value = trim(raw);
    if (is_na(value, fmt)) return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Parses one delimited station file against its declared layout. Malformed
/// rows land in the rejects report; more than half the data rows rejected is
/// a hard error.
inline ParseResult parse_station_file(const std::filesystem::path& path, const FormatSpec& fmt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open station file: " + path.string());

    const int max_col =
        std::max({fmt.station_col, fmt.date_col, fmt.tmin_col, fmt.tmax_col, fmt.tavg_col});

    ParseResult result;
    std::string line;
    std::size_t line_number = 0;
    bool header_pending = fmt.has_header;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header_pending) {
            header_pending = false;
            if (!fmt.expected_header.empty()) {
                auto fields = detail::split(line, fmt.delimiter);
                for (auto& f : fields) f = detail::trim(f);
                if (fields != fmt.expected_header) {
                    std::string want;
                    for (const auto& h : fmt.expected_header)
                        want += (want.empty() ? "" : ",") + h;
                    throw DataError("header mismatch in " + path.string() + ": got '" + line +
                                    "', expected '" + want + "'");
                }
            }
            continue;
        }
        if (detail::trim(line).empty()) continue;
        ++result.data_rows;

        const auto fields = detail::split(line, fmt.delimiter);
        auto reject = [&](std::string reason) {
            result.rejects.push_back({line_number, line, std::move(reason)});
        };
        if (static_cast<int>(fields.size()) <= max_col) {
            reject("too few columns");
            continue;
        }

        StationRecord rec;
        rec.station_id = detail::trim(fields[static_cast<std::size_t>(fmt.station_col)]);
        if (rec.station_id.empty()) {
            reject("empty station id");
            continue;
        }
        const auto date = detail::parse_date(
            detail::trim(fields[static_cast<std::size_t>(fmt.date_col)]), fmt.date_format);
        if (!date) {
            reject("invalid date");
            continue;
        }
        rec.date = *date;

        auto temp_at = [&](int col) -> std::optional<double> {
            if (col < 0) return std::numeric_limits<double>::quiet_NaN();
            return detail::parse_temp(fields[static_cast<std::size_t>(col)], fmt);
        };
        const auto tmin = temp_at(fmt.tmin_col);
        const auto tmax = temp_at(fmt.tmax_col);
        const auto tavg = temp_at(fmt.tavg_col);
        if (!tmin || !tmax || !tavg) {
            reject("unparseable temperature");
            continue;
        }
        rec.tmin = *tmin;
        rec.tmax = *tmax;
        rec.tavg = *tavg;
        if (std::isnan(rec.tavg)) {
            if (std::isnan(rec.tmin) || std::isnan(rec.tmax)) {
                reject("missing temperature");
                continue;
            }
            rec.tavg = 0.5 * (rec.tmin + rec.tmax);
        }
        if (!std::isnan(rec.tmin) && !std::isnan(rec.tmax) &&
            (rec.tmin > rec.tavg + 1e-9 || rec.tavg > rec.tmax + 1e-9)) {
            reject("temperature ordering violated");
            continue;
        }
        result.records.push_back(std::move(rec));
    }

    if (result.data_rows > 0 &&
        result.rejects.size() * 2 > result.data_rows)
        throw DataError("more than half the rows rejected in " + path.string() + " (" +
                        std::to_string(result.rejects.size()) + "/" +
                        std::to_string(result.data_rows) + ")");
    return result;
}

/// The monthly mean of one station, the cross-sectional unit of the analysis.
struct StationMonthUnit {
    std::string station_id;
    int year = 0;
    int month = 0;
    double value = 0.0;

    auto operator<=>(const StationMonthUnit&) const = default;
};

struct OmittedMonth {
    std::string station_id;
    int year = 0;
    int month = 0;
    int days_present = 0;
    int days_in_month = 0;
};

struct MonthlyBuildResult {
    std::vector<StationMonthUnit> units;
    std::vector<OmittedMonth> omitted;
};

/// Collapses daily records into station-month units. A month must cover at
/// least `coverage_threshold` of its days; duplicate dates are averaged first.
inline MonthlyBuildResult build_station_month_units(std::span<const StationRecord> records,
                                                    double coverage_threshold = 0.8) {
    struct DayAccum {
        double sum = 0.0;
        int count = 0;
    };
    // (station, year, month) -> day -> mean tavg
    std::map<std::tuple<std::string, int, int>, std::map<int, DayAccum>> months;
    for (const auto& rec : records) {
        if (std::isnan(rec.tavg)) continue;
        auto& day = months[{rec.station_id, rec.date.year, rec.date.month}][rec.date.day];
        day.sum += rec.tavg;
        day.count += 1;
    }

    MonthlyBuildResult result;
    for (const auto& [key, days] : months) {
        const auto& [station, year, month] = key;
        const int n_days = days_in_month(year, month);
        if (static_cast<double>(days.size()) < coverage_threshold * n_days) {
            result.omitted.push_back(
                {station, year, month, static_cast<int>(days.size()), n_days});
            continue;
        }
        double sum = 0.0;
        for (const auto& [day, acc] : days) sum += acc.sum / acc.count;
        result.units.push_back({station, year, month, sum / static_cast<double>(days.size())});
    }
    return result;  // std::map iteration keeps the output order deterministic
}

/// Treats already-monthly records as units directly (one record per
/// station-month; duplicates are averaged).
inline MonthlyBuildResult station_month_units_from_monthly(
    std::span<const StationRecord> records) {
    std::map<std::tuple<std::string, int, int>, std::pair<double, int>> acc;
    for (const auto& rec : records) {
        if (std::isnan(rec.tavg)) continue;
        auto& slot = acc[{rec.station_id, rec.date.year, rec.date.month}];
        slot.first += rec.tavg;
        slot.second += 1;
    }
    MonthlyBuildResult result;
    for (const auto& [key, sum_count] : acc) {
        const auto& [station, year, month] = key;
        result.units.push_back({station, year, month, sum_count.first / sum_count.second});
    }
    return result;
}

enum class PanelMode { cross_sectional_monthly, single_station_daily };

/// Which balanced-panel rule keeps a cross-sectional unit: strict_station
/// keeps only stations with all 12 months in every year; station_month keeps
/// each (station, month) cell that is present in every year.
enum class PanelRule { strict_station, station_month };

struct PanelSpec {
    int start_year = 0;
    int end_year = 0;
    PanelMode mode = PanelMode::cross_sectional_monthly;
    double coverage = 0.8;
    PanelRule rule = PanelRule::strict_station;
};

struct PanelResult {
    std::vector<std::string> stations;  ///< stations contributing to the panel
    std::vector<dist::AnnualSample> samples;
    std::size_t units_per_year = 0;
    std::vector<std::pair<std::string, int>> kept_cells;  ///< (station, month) in the panel
    std::vector<std::pair<std::string, int>> dropped;     ///< station -> missing cell count
};

/// Selects the balanced panel over [start_year, end_year] and assembles one
/// AnnualSample per year from the kept station-month units.
inline PanelResult select_balanced_panel(std::span<const StationMonthUnit> units,
                                         const PanelSpec& spec) {
    if (spec.start_year >= spec.end_year)
        throw std::invalid_argument("select_balanced_panel: start_year must precede end_year");
    const int n_years = spec.end_year - spec.start_year + 1;

    // presence maps within the window
    std::map<std::string, std::set<std::pair<int, int>>> present;  // station -> {year, month}
    std::map<std::pair<std::string, int>, std::set<int>> cell_years;  // (station,month) -> years
    std::map<std::tuple<std::string, int, int>, double> value;
    for (const auto& u : units) {
        if (u.year < spec.start_year || u.year > spec.end_year) continue;
        present[u.station_id].insert({u.year, u.month});
        cell_years[{u.station_id, u.month}].insert(u.year);
        value[{u.station_id, u.year, u.month}] = u.value;
    }

    PanelResult result;
    std::vector<std::pair<std::string, int>> kept_cells;  // (station, month)
    if (spec.rule == PanelRule::strict_station) {
        for (const auto& [station, cells] : present) {
            const int missing = 12 * n_years - static_cast<int>(cells.size());
            if (missing == 0) {
                result.stations.push_back(station);
                for (int m = 1; m <= 12; ++m) kept_cells.push_back({station, m});
            } else {
                result.dropped.push_back({station, missing});
            }
        }
    } else {
        std::set<std::string> stations;
        for (const auto& [cell, years] : cell_years) {
            if (static_cast<int>(years.size()) == n_years) {
                kept_cells.push_back(cell);
                stations.insert(cell.first);
            }
        }
        result.stations.assign(stations.begin(), stations.end());
        for (const auto& [station, cells] : present) {
            if (!stations.count(station))
                result.dropped.push_back(
                    {station, 12 * n_years - static_cast<int>(cells.size())});
        }
    }

    if (kept_cells.empty()) {
        std::sort(result.dropped.begin(), result.dropped.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        std::string msg = "select_balanced_panel: no station survives " +
                          std::to_string(spec.start_year) + "-" + std::to_string(spec.end_year);
        msg += "; closest stations by missing cells:";
        for (std::size_t i = 0; i < std::min<std::size_t>(result.dropped.size(), 5); ++i)
            msg += " " + result.dropped[i].first + "(missing " +
                   std::to_string(result.dropped[i].second) + ")";
        throw DataError(msg);
    }

    result.units_per_year = kept_cells.size();
    for (int year = spec.start_year; year <= spec.end_year; ++year) {
        dist::AnnualSample sample;
        sample.year = year;
        sample.values.reserve(kept_cells.size());
        for (const auto& [station, month] : kept_cells)
            sample.values.push_back(value.at({station, year, month}));
        std::sort(sample.values.begin(), sample.values.end());
        result.samples.push_back(std::move(sample));
    }
    result.kept_cells = std::move(kept_cells);
    return result;
}

struct DailyAssembly {
    std::vector<dist::AnnualSample> samples;
    std::vector<std::pair<int, int>> dropped_years;  ///< year -> days present
};

/// Annual samples straight from the daily records of a single station. Years
/// below the day-coverage threshold are dropped and reported.
inline DailyAssembly assemble_daily_annual_samples(std::span<const StationRecord> records,
                                                   const PanelSpec& spec) {
    if (spec.start_year >= spec.end_year)
        throw std::invalid_argument(
            "assemble_daily_annual_samples: start_year must precede end_year");
    std::set<std::string> stations;
    for (const auto& rec : records) stations.insert(rec.station_id);
    if (stations.size() > 1) {
        std::string msg = "assemble_daily_annual_samples: expected a single station, got";
        for (const auto& s : stations) msg += " " + s;
        throw DataError(msg);
    }

    std::map<int, std::map<Date, std::pair<double, int>>> years;
    for (const auto& rec : records) {
        if (std::isnan(rec.tavg)) continue;
        if (rec.date.year < spec.start_year || rec.date.year > spec.end_year) continue;
        auto& slot = years[rec.date.year][rec.date];
        slot.first += rec.tavg;
        slot.second += 1;
    }

    DailyAssembly result;
    for (const auto& [year, days] : years) {
        if (static_cast<double>(days.size()) < spec.coverage * days_in_year(year)) {
            result.dropped_years.push_back({year, static_cast<int>(days.size())});
            continue;
        }
        dist::AnnualSample sample;
        sample.year = year;
        sample.values.reserve(days.size());
        for (const auto& [date, acc] : days) sample.values.push_back(acc.first / acc.second);
        std::sort(sample.values.begin(), sample.values.end());
        result.samples.push_back(std::move(sample));
    }
    return result;
}

}  // namespace climtrend::ingest
