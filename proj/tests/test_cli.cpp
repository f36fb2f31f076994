#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#ifndef CLIMTREND_BIN
#error "CLIMTREND_BIN must point at the climtrend executable"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = "env -u CLIMTREND_CONFIG " + env_prefix + " " +
                            std::string(CLIMTREND_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliWorkspace : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("climtrend_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter_++));
        fs::create_directories(dir_);
        write_station_files();
        write_config();
    }
    void TearDown() override { fs::remove_all(dir_); }

    // monthly-granularity files: 5 stations x 30 years x 12 months each
    void write_station_files() {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> normal(0.0, 1.0);
        auto write_region = [&](const std::string& name, double slope, double dispersion_slope) {
            std::ofstream out(dir_ / (name + ".csv"));
            out << "station,date,tmin,tmax,tavg\n";
            for (int year = 1980; year <= 2009; ++year) {
                const int t = year - 1979;
                for (int s = 0; s < 5; ++s) {
                    for (int m = 1; m <= 12; ++m) {
                        const double seasonal = 8.0 * std::sin(2.0 * 3.14159265 * (m - 1) / 12.0);
                        const double scale = 1.0 + dispersion_slope * t;
                        const double v = 12.0 + slope * t + seasonal + scale * normal(rng);
                        char date[16];
                        std::snprintf(date, sizeof(date), "%04d-%02d", year, m);
                        out << name << s << "," << date << ",," << "," << v << "\n";
                    }
                }
            }
        };
        write_region("alpha", 0.05, 0.01);
        write_region("beta", 0.02, 0.0);
    }

    void write_config() {
        std::ofstream out(dir_ / "run.json");
        out << R"({
          "dataset": {
            "name": "alpha", "path": "alpha.csv",
            "format": {"date_format": "%Y-%m", "granularity": "monthly",
                       "columns": {"station_id": 0, "date": 1, "tmin": 2, "tmax": 3, "tavg": 4}},
            "mode": "cross-sectional-monthly", "start_year": 1980, "end_year": 2009
          },
          "reference": {
            "name": "beta", "path": "beta.csv",
            "format": {"date_format": "%Y-%m", "granularity": "monthly",
                       "columns": {"station_id": 0, "date": 1, "tmin": 2, "tmax": 3, "tavg": 4}},
            "mode": "cross-sectional-monthly", "start_year": 1980, "end_year": 2009
          },
          "periods": [[1980, 2009]],
          "split_year": 1995,
          "out": "out"
        })";
    }

    std::string config_flag() const { return "--config " + (dir_ / "run.json").string(); }

    static inline int counter_ = 0;
    fs::path dir_;
};

}  // namespace

TEST_F(CliWorkspace, RequiresSubcommand) { EXPECT_NE(run_cli(""), 0); }

TEST_F(CliWorkspace, MissingConfigIsConfigError) {
    EXPECT_EQ(run_cli("analyze --config /nonexistent.json"), 2);
    // env fallback also reports config errors
    EXPECT_EQ(run_cli("analyze"), 2);
}

TEST_F(CliWorkspace, MissingDataFileIsDataError) {
    std::ofstream out(dir_ / "broken.json");
    out << R"({"dataset": {"name": "x", "path": "missing.csv",
               "start_year": 1980, "end_year": 2009}})";
    out.close();
    EXPECT_EQ(run_cli("ingest --config " + (dir_ / "broken.json").string()), 3);
}

TEST_F(CliWorkspace, IngestWritesMatrixAndRejects) {
    ASSERT_EQ(run_cli("ingest " + config_flag()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "out/alpha/characteristics.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out/alpha/rejects.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out/beta/characteristics.csv"));
    // 19 characteristics + year column
    std::ifstream in(dir_ / "out/alpha/characteristics.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), 19);
}

TEST_F(CliWorkspace, AnalyzeProducesReportFamiliesAndIsDeterministic) {
    ASSERT_EQ(run_cli("analyze " + config_flag()), 0);
    for (const char* f :
         {"trend_acceleration.csv", "cotrending_1980-2009.csv", "amplification_1980-2009.csv",
          "adf_1980-2009.csv", "typology.csv", "summary.csv"}) {
        EXPECT_TRUE(fs::exists(dir_ / "out/alpha" / f)) << f;
        EXPECT_TRUE(fs::exists(dir_ / "out/beta" / f)) << f;
    }
    ASSERT_TRUE(fs::exists(dir_ / "out/results.json"));
    const auto first = slurp(dir_ / "out/results.json");
    ASSERT_EQ(run_cli("analyze " + config_flag()), 0);
    EXPECT_EQ(first, slurp(dir_ / "out/results.json"));
}

TEST_F(CliWorkspace, LevelFlagPassesThrough) {
    ASSERT_EQ(run_cli("analyze " + config_flag() + " --level 0.01"), 0);
    std::ifstream in(dir_ / "out/alpha/typology.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_NE(row.find("0.01"), std::string::npos);
}

TEST_F(CliWorkspace, EnvVarSuppliesDefaultConfig) {
    EXPECT_EQ(run_cli("ingest", "CLIMTREND_CONFIG=" + (dir_ / "run.json").string()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "out/alpha/characteristics.csv"));
}

TEST_F(CliWorkspace, CompareEmitsDominanceTable) {
    ASSERT_EQ(run_cli("compare " + config_flag()), 0);
    ASSERT_TRUE(fs::exists(dir_ / "out/dominance.csv"));
    std::ifstream in(dir_ / "out/dominance.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "tau,beta,t_stat,p_two_sided");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 11);
}

TEST_F(CliWorkspace, ReportNeedsAnalyzeFirst) {
    EXPECT_EQ(run_cli("report " + config_flag()), 3);
    ASSERT_EQ(run_cli("analyze " + config_flag()), 0);
    ASSERT_EQ(run_cli("report " + config_flag()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "out/heatmap.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out/bars.csv"));
}

TEST_F(CliWorkspace, SimulateBetaSuitePasses) {
    ASSERT_EQ(run_cli("simulate --suite beta --seed 11 --out " + (dir_ / "sim").string()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "sim/rate_checks.csv"));
}
