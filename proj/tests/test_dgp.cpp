#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "climtrend/dgp.hpp"

using namespace climtrend;

namespace {

sim::DgpSpec spec_of(sim::DgpKind kind, int T, std::uint64_t seed) {
    sim::DgpSpec s;
    s.kind = kind;
    s.length = T;
    s.seed = seed;
    return s;
}

// sample variance of the endpoint across replications
double endpoint_variance(const sim::DgpSpec& base, int reps) {
    std::vector<double> ends(static_cast<std::size_t>(reps));
    sim::parallel_reps(reps, [&](int r) {
        auto s = base;
        s.seed = splitmix64(base.seed + static_cast<std::uint64_t>(r));
        const auto z = sim::generate_values(s);
        ends[static_cast<std::size_t>(r)] = z.back();
    });
    double mean = 0.0;
    for (double v : ends) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : ends) var += (v - mean) * (v - mean);
    return var / (reps - 1);
}

}  // namespace

TEST(Generate, SeededDeterminism) {
    for (auto kind : {sim::DgpKind::iid, sim::DgpKind::ar1, sim::DgpKind::random_walk,
                      sim::DgpKind::fractional, sim::DgpKind::near_unit_root,
                      sim::DgpKind::local_level}) {
        auto s = spec_of(kind, 300, 987654321u);
        s.rho = 0.5;
        s.d = 0.8;
        s.c = 5.0;
        s.q = 1.0;
        const auto a = sim::generate_values(s);
        const auto b = sim::generate_values(s);
        EXPECT_EQ(a, b) << sim::to_string(kind);
    }
}

TEST(Generate, LocalLevelAtZeroNoiseIsRandomWalk) {
    auto ll = spec_of(sim::DgpKind::local_level, 500, 42);
    ll.q = 0.0;
    auto rw = spec_of(sim::DgpKind::random_walk, 500, 42);
    EXPECT_EQ(sim::generate_values(ll), sim::generate_values(rw));
}

TEST(Generate, FractionalAtUnitOrderIsRandomWalk) {
    // d = 1 makes every MA coefficient exactly one, so the convolution is the
    // running sum of the innovations; only summation order differs.
    auto fr = spec_of(sim::DgpKind::fractional, 2000, 4242);
    fr.d = 1.0;
    auto rw = spec_of(sim::DgpKind::random_walk, 2000, 4242);
    const auto a = sim::generate_values(fr);
    const auto b = sim::generate_values(rw);
    for (std::size_t t = 0; t < a.size(); ++t) {
        EXPECT_NEAR(a[t], b[t], 1e-9 * std::max(1.0, std::fabs(b[t])));
    }
}

TEST(Generate, NestedModelsReproduceRandomWalkVarianceGrowth) {
    // Var(z_T) = T * sigma^2 for the pure unit-root process.
    const int T = 10000;
    const int reps = 600;
    const double target = static_cast<double>(T);

    auto rw = spec_of(sim::DgpKind::random_walk, T, 1);
    EXPECT_NEAR(endpoint_variance(rw, reps), target, 0.10 * target);

    auto nur = spec_of(sim::DgpKind::near_unit_root, T, 2);
    nur.c = 0.0;
    EXPECT_NEAR(endpoint_variance(nur, reps), target, 0.10 * target);

    auto ll = spec_of(sim::DgpKind::local_level, T, 3);
    ll.q = 0.0;
    EXPECT_NEAR(endpoint_variance(ll, reps), target, 0.10 * target);
}

TEST(Generate, PolynomialTrendIsDeterministicPlusNoise) {
    auto s = spec_of(sim::DgpKind::polynomial_trend, 100, 7);
    s.poly = {2.0, 0.5};
    s.sigma = 1e-8;
    const auto z = sim::generate_values(s);
    for (int t = 0; t < 100; ++t)
        EXPECT_NEAR(z[static_cast<std::size_t>(t)], 2.0 + 0.5 * (t + 1), 1e-6);
}

TEST(Generate, ValidatesParameters) {
    auto s = spec_of(sim::DgpKind::fractional, 100, 1);
    s.d = 0.3;
    EXPECT_THROW(sim::generate_values(s), std::invalid_argument);
    s.d = 1.6;
    EXPECT_THROW(sim::generate_values(s), std::invalid_argument);
    auto bad_sigma = spec_of(sim::DgpKind::iid, 100, 1);
    bad_sigma.sigma = 0.0;
    EXPECT_THROW(sim::generate_values(bad_sigma), std::invalid_argument);
}

TEST(RateCheck, IidBetaShrinksAtThreeHalves) {
    const std::vector<int> lengths{100, 400, 1600};
    const auto res =
        sim::rate_check_beta(spec_of(sim::DgpKind::iid, 0, 555), lengths, 300, -1.5);
    EXPECT_TRUE(res.pass) << "fitted exponent " << res.fitted_exponent;
    EXPECT_NEAR(res.fitted_exponent, -1.5, 0.15);
}

TEST(RateCheck, RandomWalkBetaShrinksAtOneHalf) {
    const std::vector<int> lengths{100, 400, 1600};
    const auto res =
        sim::rate_check_beta(spec_of(sim::DgpKind::random_walk, 0, 556), lengths, 300, -0.5);
    EXPECT_TRUE(res.pass) << "fitted exponent " << res.fitted_exponent;
}

TEST(RateCheck, LinearTrendBetaIsConsistent) {
    const std::vector<int> lengths{100, 400, 1600};
    auto s = spec_of(sim::DgpKind::polynomial_trend, 0, 557);
    s.poly = {1.0, 0.05};
    const auto res = sim::rate_check_beta(s, lengths, 300, 0.0);
    EXPECT_TRUE(res.pass) << "fitted exponent " << res.fitted_exponent;
    for (double m : res.medians) EXPECT_NEAR(m, 0.05, 0.01);
}

TEST(RateCheck, RandomWalkTStatDivergesAtOneHalf) {
    const std::vector<int> lengths{100, 400, 1600};
    const auto res =
        sim::rate_check_tstat(spec_of(sim::DgpKind::random_walk, 0, 558), lengths, 300, 0.5);
    EXPECT_TRUE(res.pass) << "fitted exponent " << res.fitted_exponent;
}

TEST(RateCheck, IidTStatStaysBounded) {
    const std::vector<int> lengths{100, 400, 1600};
    const auto res =
        sim::rate_check_tstat(spec_of(sim::DgpKind::iid, 0, 559), lengths, 300, 0.0);
    EXPECT_TRUE(res.pass) << "fitted exponent " << res.fitted_exponent;
    // |t| of a N(0,1) statistic has median about 0.674
    for (double m : res.medians) EXPECT_NEAR(m, 0.674, 0.2);
}

TEST(RateCheck, RejectsDegenerateSetups) {
    const std::vector<int> two{100, 200};
    EXPECT_THROW(
        sim::rate_check_beta(spec_of(sim::DgpKind::iid, 0, 1), two, 300, -1.5),
        std::invalid_argument);
    const std::vector<int> lengths{100, 200, 400};
    EXPECT_THROW(
        sim::rate_check_beta(spec_of(sim::DgpKind::iid, 0, 1), lengths, 100, -1.5),
        std::invalid_argument);
}
