#include <gtest/gtest.h>

#include "loewner/approx.hpp"

using namespace loewner;

namespace {

DenjoyWolffSpec moving_tau() {
    return DenjoyWolffSpec::sampled([](double t) { return cplx(t / (1 + t)); }, 1.0);
}

}  // namespace

TEST(StepApproximant, ConstantIsExact) {
    auto a = step_approximate(DenjoyWolffSpec::constant(cplx(0.2, 0.3)), 5, 2.0);
    for (cplx v : a.values) EXPECT_EQ(v, cplx(0.2, 0.3));
    EXPECT_EQ(a.deviation, 0.0);
}

TEST(StepApproximant, MidpointValues) {
    auto a = step_approximate(moving_tau(), 4, 4.0);
    std::vector<double> want{1.0 / 3, 3.0 / 5, 5.0 / 7, 7.0 / 9};
    ASSERT_EQ(a.values.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a.values[i].real(), want[i], 1e-15);
    EXPECT_EQ(a.breaks, (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(a(1.0), cplx(3.0 / 5));
    EXPECT_EQ(a(5.0), cplx(5.0 / 6));
}

TEST(StepApproximant, DeviationHalves) {
    double prev = inf;
    for (std::size_t n : {4, 8, 16, 32}) {
        auto a = step_approximate(moving_tau(), n, 4.0);
        if (std::isfinite(prev)) {
            EXPECT_GT(a.deviation / prev, 0.25);
            EXPECT_LT(a.deviation / prev, 1.0);
        }
        prev = a.deviation;
    }
}

TEST(StepApproximant, SpecRespectsCells) {
    auto a = step_approximate(moving_tau(), 4, 4.0);
    auto s = a.spec();
    EXPECT_EQ(s.on_segment(2.0, 1.5), cplx(3.0 / 5));
    EXPECT_EQ(s.on_segment(2.0, 2.5), cplx(5.0 / 7));
    auto b = s.breakpoints();
    EXPECT_EQ(b.back(), 4.0);
}

TEST(FieldDeviation, PointExample) {
    auto r = field_deviation(HerglotzSpec::constant(1.0), DenjoyWolffSpec::constant(0.5),
                             DenjoyWolffSpec::constant(0.4), DiskGrid{{0.0}, 1}, {0.0});
    EXPECT_NEAR(r.max_measured, 0.1, 1e-15);
    EXPECT_NEAR(r.max_bound, 0.4, 1e-15);
    EXPECT_TRUE(r.pass);
}

TEST(FieldDeviation, IdenticalDataIsZero) {
    auto tau = moving_tau();
    auto r = field_deviation(HerglotzSpec::becker(0.5), tau, tau, DiskGrid::standard(), {0, 1, 2});
    EXPECT_EQ(r.max_measured, 0.0);
    EXPECT_EQ(r.max_bound, 0.0);
}

TEST(FieldDeviation, StepApproximantOnGrid) {
    auto tau = moving_tau();
    auto a = step_approximate(tau, 8, 4.0);
    auto r = field_deviation(HerglotzSpec::becker(0.5), tau, a.spec(), DiskGrid::standard(), linspace(0, 4, 33));
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_ratio, 1.0);
}

TEST(FieldDeviation, RandomizedSamples) {
    auto r = field_deviation_random(10000, 7);
    EXPECT_EQ(r.samples, 10000u);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_LE(r.max_ratio, 1.0 + 1e-12);
}

TEST(Gronwall, ConstantCoefficients) {
    auto e = gronwall_envelope([](double) { return 0.1; }, [](double) { return 1.0; }, 0, {0.5, 1.0});
    EXPECT_NEAR(e[1], 0.1 * std::exp(1.0), 1e-9);
    EXPECT_NEAR(e[0], 0.1 * std::exp(0.5), 1e-9);
}

TEST(Gronwall, ZeroRateReturnsH) {
    auto e = gronwall_envelope([](double t) { return t * t; }, [](double) { return 0.0; }, 0, {0.7});
    EXPECT_NEAR(e[0], 0.49, 1e-14);
}

TEST(Gronwall, LinearH) {
    auto e = gronwall_envelope([](double t) { return t; }, [](double) { return 1.0; }, 0, {1.0});
    EXPECT_NEAR(e[0], std::exp(1.0) - 1, 1e-9);
}

TEST(EfConvergence, ConstantTauIsNoise) {
    auto seeds = SeedGrid::circles({0.3, 0.6}, 8);
    auto t = ef_convergence(HerglotzSpec::constant(1.0), DenjoyWolffSpec::constant(0.4), {2, 4}, seeds, 0, 2,
                            {1, 2});
    for (const auto& r : t.rows) {
        EXPECT_LE(r.ef_error, 10 * 1e-10);
        EXPECT_TRUE(r.under_envelope);
    }
}

TEST(EfConvergence, MovingTauDecreasesUnderEnvelope) {
    auto seeds = SeedGrid::circles({0.3, 0.6}, 8);
    auto t = ef_convergence(HerglotzSpec::constant(1.0), moving_tau(), {4, 8, 16, 32}, seeds, 0, 2,
                            {0.5, 1, 1.5, 2});
    EXPECT_TRUE(t.ef_decreasing);
    for (const auto& r : t.rows) {
        EXPECT_TRUE(r.under_envelope) << r.n;
        EXPECT_LE(r.ef_error, r.envelope);
    }
    EXPECT_LE(t.rows.back().ef_error, 1e-3);
    EXPECT_THROW(ef_convergence(HerglotzSpec::constant(1.0), moving_tau(), {4}, seeds, 0, 5, {}), Error);
}

TEST(ChainConvergence, MovingTau) {
    auto seeds = SeedGrid::circles({0.3, 0.6}, 8);
    auto t = ef_convergence(HerglotzSpec::constant(1.0), moving_tau(), {4, 8, 16}, seeds, 0, 2, {1, 2});
    FrameSpec fs;
    fs.checkpoints = {0, 1, 2};
    fs.grid = SeedGrid::circles({0.0, 0.3, 0.6}, 16);
    fs.theta = angles(16);
    ChainOptions co;
    co.tol_limit = 1e-6;
    co.horizon = 1024;
    chain_convergence(t, HerglotzSpec::constant(1.0), moving_tau(), fs, co);
    EXPECT_TRUE(t.chain_decreasing);
    for (const auto& r : t.rows) EXPECT_TRUE(r.chain_converged);
}

TEST(ChainConvergence, RotationLevelsCoincide) {
    auto p = HerglotzSpec::constant(cplx(0, 1));
    auto seeds = SeedGrid::circles({0.3}, 8);
    auto t = ef_convergence(p, DenjoyWolffSpec::constant(0.0), {4, 8}, seeds, 0, 1, {1});
    FrameSpec fs;
    fs.checkpoints = {0, 1};
    fs.grid = SeedGrid::circles({0.0, 0.3}, 8);
    fs.theta = angles(8);
    chain_convergence(t, p, DenjoyWolffSpec::constant(0.0), fs);
    for (const auto& r : t.rows) EXPECT_LT(r.chain_error, 1e-9);
}

TEST(ChainConvergence, RotationWithMovingTauKeepsTheDisk) {
    auto p = HerglotzSpec::constant(cplx(0, 1));
    FrameSpec fs;
    fs.checkpoints = {0, 0.5, 1};
    fs.grid = SeedGrid::circles({0.0, 0.3}, 8);
    fs.theta = angles(32);
    for (std::size_t n : {4, 8}) {
        auto a = step_approximate(moving_tau(), n, 1.0);
        auto fr = range_normalized_chain(assemble_field(p, a.spec()), fs);
        for (const auto& row : fr.trace)
            for (cplx v : row) {
                EXPECT_LT(std::abs(v), 1.0);
                EXPECT_GT(std::abs(v), 1.0 - 0.05);
            }
    }
}
