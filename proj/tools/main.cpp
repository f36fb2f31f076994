// climtrend command line: ingestion, the trend-test battery, region
// comparison, the simulation checks, and plot-ready exports.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "climtrend/config.hpp"
#include "climtrend/dgp.hpp"
#include "climtrend/pipeline.hpp"
#include "climtrend/report.hpp"

namespace fs = std::filesystem;
using namespace climtrend;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSimFailed = 4;

struct CliOverrides {
    std::string config_path;
    std::vector<std::string> periods;
    int split_year = -1;
    double level = -1.0;
    int bandwidth = -2;  // -2 unset, -1 auto rule, >=0 fixed
    std::int64_t seed = -1;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_path,
                    "run configuration file (JSON); default from CLIMTREND_CONFIG");
    cmd->add_option("--period", ov.periods,
                    "analysis period as FIRST:LAST (repeatable, overrides config)");
    cmd->add_option("--split-year", ov.split_year, "acceleration split year");
    cmd->add_option("--level", ov.level, "significance level for verdicts");
    cmd->add_option("--bandwidth", ov.bandwidth, "HAC bandwidth (-1 = automatic rule)");
    cmd->add_option("--seed", ov.seed, "simulation seed");
    cmd->add_option("--out", ov.out, "output directory");
}

config::RunConfig resolve_config(const CliOverrides& ov, bool config_required) {
    std::string path = ov.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CLIMTREND_CONFIG")) path = env;
    }
    config::RunConfig cfg;
    if (!path.empty()) {
        cfg = config::load_config(path);
    } else if (config_required) {
        throw config::ConfigError(
            "no config file given (use --config or set CLIMTREND_CONFIG)");
    }
    for (const auto& p : ov.periods) {
        const auto sep = p.find_first_of(":-");
        if (sep == std::string::npos)
            throw config::ConfigError("bad --period '" + p + "', expected FIRST:LAST");
        warming::Period period{std::stoi(p.substr(0, sep)), std::stoi(p.substr(sep + 1))};
        if (&p == &ov.periods.front()) cfg.periods.clear();
        cfg.periods.push_back(period);
    }
    if (ov.split_year >= 0) cfg.split_year = ov.split_year;
    if (ov.level > 0.0) cfg.level = ov.level;
    if (ov.bandwidth >= -1) cfg.bandwidth = ov.bandwidth;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (!ov.out.empty()) cfg.out = ov.out;
    return cfg;
}

warming::PipelineOptions pipeline_options(const config::RunConfig& cfg) {
    warming::PipelineOptions opts;
    opts.periods = cfg.periods;
    if (opts.periods.empty() && cfg.dataset)
        opts.periods = {{cfg.dataset->panel.start_year, cfg.dataset->panel.end_year}};
    opts.split_year = cfg.split_year;
    opts.tau_grid = cfg.tau_grid;
    opts.level = cfg.level;
    opts.bandwidth = cfg.bandwidth;
    return opts;
}

void write_ingest_outputs(const fs::path& dir, const config::LoadedDataset& data) {
    fs::create_directories(dir);
    report::write_table(dir / "characteristics.csv",
                        report::characteristic_matrix(data.series));
    report::write_table(dir / "rejects.csv", report::rejects_table(data.parse.rejects));
    std::cout << data.name << ": " << data.parse.data_rows << " rows, "
              << data.parse.records.size() << " parsed, " << data.parse.rejects.size()
              << " rejected, " << data.filtered_rows << " filtered; " << data.samples.size()
              << " years";
    if (data.units_per_year > 0)
        std::cout << ", " << data.units_per_year << " units/year from "
                  << data.panel_stations.size() << " stations";
    std::cout << "\n";
}

void write_analysis_outputs(const fs::path& dir, const warming::PipelineReport& rep) {
    fs::create_directories(dir);
    report::write_table(dir / "trend_acceleration.csv",
                        report::trend_acceleration_table(rep));
    for (const auto& p : rep.periods) {
        report::write_table(dir / ("cotrending_" + p.period.label() + ".csv"),
                            report::cotrending_table(p));
        report::write_table(dir / ("amplification_" + p.period.label() + ".csv"),
                            report::amplification_table(p));
        report::write_table(dir / ("adf_" + p.period.label() + ".csv"),
                            report::adf_table(p));
    }
    report::write_table(dir / "typology.csv", report::typology_table(rep));
    report::write_table(dir / "summary.csv", report::summary_table(rep));
}

int cmd_ingest(const CliOverrides& ov) {
    const auto cfg = resolve_config(ov, true);
    if (!cfg.dataset) throw config::ConfigError("ingest: config has no dataset");
    fs::create_directories(cfg.out);
    const auto data = config::load_dataset(*cfg.dataset);
    write_ingest_outputs(cfg.out / data.name, data);
    if (cfg.reference) {
        const auto ref = config::load_dataset(*cfg.reference);
        write_ingest_outputs(cfg.out / ref.name, ref);
    }
    return 0;
}

int cmd_analyze(const CliOverrides& ov) {
    const auto cfg = resolve_config(ov, true);
    if (!cfg.dataset) throw config::ConfigError("analyze: config has no dataset");
    const auto opts = pipeline_options(cfg);

    const auto data = config::load_dataset(*cfg.dataset);
    std::optional<config::LoadedDataset> ref;
    if (cfg.reference) ref = config::load_dataset(*cfg.reference);

    const auto rep = warming::run_pipeline(
        data.samples, ref ? std::span<const dist::AnnualSample>(ref->samples)
                          : std::span<const dist::AnnualSample>(),
        opts, data.name, ref ? ref->name : "reference");

    fs::create_directories(cfg.out);
    write_analysis_outputs(cfg.out / data.name, rep);

    report::json results = report::json::array();
    results.push_back(report::to_json(rep));
    if (ref) {
        const auto ref_rep = warming::run_pipeline(ref->samples, {}, opts, ref->name);
        write_analysis_outputs(cfg.out / ref->name, ref_rep);
        results.push_back(report::to_json(ref_rep));
    }
    report::write_json(cfg.out / "results.json", results);

    for (const auto& p : rep.periods)
        std::cout << data.name << " " << p.period.label() << ": "
                  << warming::to_string(p.typology.label)
                  << (p.typology.low_confidence ? " (low confidence)" : "") << "\n";
    return 0;
}

int cmd_compare(const CliOverrides& ov) {
    const auto cfg = resolve_config(ov, true);
    if (!cfg.dataset || !cfg.reference)
        throw config::ConfigError(
            "compare: config needs dataset (region A) and reference (region B)");
    const auto opts = pipeline_options(cfg);

    const auto a = config::load_dataset(*cfg.dataset);
    const auto b = config::load_dataset(*cfg.reference);
    const auto rep = warming::run_pipeline(a.samples, b.samples, opts, a.name, b.name);

    fs::create_directories(cfg.out);
    report::write_table(cfg.out / "dominance.csv", report::dominance_table(*rep.dominance));
    std::cout << a.name << " vs " << b.name << ": "
              << warming::to_string(rep.dominance->verdict) << "\n";
    return 0;
}

int cmd_simulate(const CliOverrides& ov, const std::string& suite) {
    const auto cfg = resolve_config(ov, false);
    const std::vector<int> lengths{100, 400, 1600};
    const int reps = 500;
    std::vector<sim::RateCheckResult> checks;

    auto spec = [&](sim::DgpKind kind) {
        sim::DgpSpec s;
        s.kind = kind;
        s.seed = cfg.seed;
        return s;
    };
    if (suite == "beta" || suite == "all") {
        checks.push_back(sim::rate_check_beta(spec(sim::DgpKind::iid), lengths, reps, -1.5));
        checks.push_back(
            sim::rate_check_beta(spec(sim::DgpKind::random_walk), lengths, reps, -0.5));
    }
    if (suite == "tstat" || suite == "all") {
        checks.push_back(
            sim::rate_check_tstat(spec(sim::DgpKind::random_walk), lengths, reps, 0.5));
        auto nur = spec(sim::DgpKind::near_unit_root);
        nur.c = 5.0;
        checks.push_back(sim::rate_check_tstat(nur, lengths, reps, 0.5));
        auto ll = spec(sim::DgpKind::local_level);
        ll.q = 1.0;
        checks.push_back(sim::rate_check_tstat(ll, lengths, reps, 0.5));
        auto frac = spec(sim::DgpKind::fractional);
        frac.d = 0.8;
        checks.push_back(sim::rate_check_tstat(frac, lengths, reps, 0.5));
    }

    fs::create_directories(cfg.out);
    report::write_table(cfg.out / "rate_checks.csv", report::rate_check_table(checks));
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "pass " : "FAIL ") << c.label << ": exponent "
                  << report::fmt_num(c.fitted_exponent) << " (target "
                  << report::fmt_num(c.target_exponent) << " +- "
                  << report::fmt_num(c.tolerance) << ")\n";
        ok = ok && c.pass;
    }
    return ok ? 0 : kExitSimFailed;
}

int cmd_report(const CliOverrides& ov) {
    const auto cfg = resolve_config(ov, true);
    const auto results_path = cfg.out / "results.json";
    if (!fs::exists(results_path))
        throw ingest::DataError("no analysis results at " + results_path.string() +
                                "; run 'climtrend analyze' first");
    const auto results = report::read_json(results_path);
    std::vector<warming::PipelineReport> reports;
    for (const auto& j : results) reports.push_back(report::report_from_json(j));
    if (reports.empty()) throw ingest::DataError("results.json holds no analysis results");

    report::write_table(cfg.out / "heatmap.csv", report::heatmap_table(reports));
    if (reports.size() >= 2)
        report::write_table(cfg.out / "bars.csv", report::bars_table(reports));
    std::cout << "wrote " << (cfg.out / "heatmap.csv").string();
    if (reports.size() >= 2) std::cout << " and " << (cfg.out / "bars.csv").string();
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributional temperature trend testing"};
    app.require_subcommand(1);

    CliOverrides ov;
    std::string suite = "all";

    auto* ingest_cmd = app.add_subcommand("ingest", "parse station files into characteristics");
    add_common_flags(ingest_cmd, ov);
    auto* analyze_cmd =
        app.add_subcommand("analyze", "run the full trend-test battery on a dataset");
    add_common_flags(analyze_cmd, ov);
    auto* compare_cmd =
        app.add_subcommand("compare", "warming dominance of region A over region B");
    add_common_flags(compare_cmd, ov);
    auto* simulate_cmd =
        app.add_subcommand("simulate", "validate estimator rates on simulated processes");
    add_common_flags(simulate_cmd, ov);
    simulate_cmd->add_option("--suite", suite, "beta | tstat | all")
        ->check(CLI::IsMember({"beta", "tstat", "all"}));
    auto* report_cmd =
        app.add_subcommand("report", "export heatmap/bar tables from analysis results");
    add_common_flags(report_cmd, ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(ov);
        if (analyze_cmd->parsed()) return cmd_analyze(ov);
        if (compare_cmd->parsed()) return cmd_compare(ov);
        if (simulate_cmd->parsed()) return cmd_simulate(ov, suite);
        if (report_cmd->parsed()) return cmd_report(ov);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ingest::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
