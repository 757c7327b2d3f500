#include <gtest/gtest.h>

#include "loewner/evolution.hpp"

using namespace loewner;

namespace {

VectorField field(HerglotzSpec p, cplx tau) {
    return assemble_field(std::move(p), DenjoyWolffSpec::constant(tau));
}

cplx chordal(cplx z, double s, double t) { return 1.0 + (z - 1.0) / (1.0 - (z - 1.0) * (t - s)); }

}  // namespace

TEST(Forward, ExponentialClosedForm) {
    auto ts = solve_forward(field(HerglotzSpec::constant(1.0), 0.0), 0, 1, SeedGrid::from_points({0.5}));
    EXPECT_NEAR(std::abs(ts.values.back()[0] - 0.5 * std::exp(-1.0)), 0, 1e-9);
    EXPECT_NEAR(std::abs(ts.derivs.back()[0] - std::exp(-1.0)), 0, 1e-9);
}

TEST(Forward, ChordalClosedForm) {
    auto G = field(HerglotzSpec::constant(1.0), 1.0);
    auto seeds = SeedGrid::circles({0.0, 0.3, 0.6, 0.9}, 16);
    auto ts = solve_forward(G, 0, 4, seeds, 1e-10, {1.0, 2.0, 3.0});
    EXPECT_NEAR(std::abs(ts.values[1][0] - cplx(0.5)), 0, 1e-9);
    for (std::size_t i = 0; i < ts.n_times(); ++i)
        for (std::size_t j = 0; j < seeds.size(); ++j)
            EXPECT_LT(std::abs(ts.values[i][j] - chordal(seeds.points[j], 0, ts.times[i])), 1e-8);
}

TEST(Forward, RotationClosedForm) {
    auto ts = solve_forward(field(HerglotzSpec::constant(cplx(0, 1)), 0.0), 0, pi,
                            SeedGrid::from_points({0.5}));
    EXPECT_NEAR(std::abs(ts.values.back()[0] - cplx(-0.5)), 0, 1e-9);
    EXPECT_NEAR(std::abs(ts.derivs.back()[0]), 1.0, 1e-12);
}

TEST(Forward, FirstCheckpointIsExactlyTheSeed) {
    auto seeds = SeedGrid::circles({0.2, 0.7}, 8);
    auto ts = solve_forward(field(HerglotzSpec::becker(0.5), cplx(0.1, 0.2)), 0.3, 1.0, seeds);
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        EXPECT_EQ(ts.values[0][j], seeds.points[j]);
        EXPECT_EQ(ts.derivs[0][j], cplx(1.0));
    }
    for (const auto& row : ts.values)
        for (cplx v : row) EXPECT_LT(std::abs(v), 1.0);
}

TEST(Forward, ZeroLengthIntervalIsIdentity) {
    auto seeds = SeedGrid::circles({0.5}, 4);
    auto ts = solve_forward(field(HerglotzSpec::constant(1.0), 0.0), 1, 1, seeds);
    ASSERT_EQ(ts.n_times(), 1u);
    EXPECT_EQ(ts.values[0][2], seeds.points[2]);
}

TEST(Forward, ModulusIsMonotoneForInteriorOrigin) {
    auto seeds = SeedGrid::circles({0.3, 0.8}, 16);
    auto ts = solve_forward(field(HerglotzSpec::becker(cplx(0.3, 0.5)), 0.0), 0, 3, seeds, 1e-9,
                            linspace(0, 3, 31));
    for (std::size_t j = 0; j < seeds.size(); ++j)
        for (std::size_t i = 1; i < ts.n_times(); ++i)
            EXPECT_LE(std::abs(ts.values[i][j]), std::abs(ts.values[i - 1][j]) + 1e-12);
}

TEST(Forward, VariationalDerivativeMatchesFiniteDifferences) {
    auto G = field(HerglotzSpec::becker(cplx(0.4, 0.2)), cplx(0.3, -0.2));
    double h = 1e-4;
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3), cplx(0.6, -0.6)}) {
        auto ts = solve_forward(G, 0, 2, SeedGrid::from_points({z, z + h, z - h}), 1e-11);
        cplx fd = (ts.values.back()[1] - ts.values.back()[2]) / (2 * h);
        EXPECT_LT(std::abs(ts.derivs.back()[0] - fd), 1e-5);
    }
}

TEST(Forward, BoundaryCollisionTruncates) {
    auto G = field(HerglotzSpec::constant(1.0), 1.0);
    auto ts = solve_forward(G, 0, 1e7, SeedGrid::from_points({0.0, 0.5}), 1e-9, {1.0});
    EXPECT_EQ(ts.truncated_count(), 2u);
    EXPECT_TRUE(ts.log[0].error.empty());
    EXPECT_FALSE(ts.live(ts.n_times() - 1, 0));
    EXPECT_TRUE(ts.live(1, 0));
    EXPECT_LT(ts.log[0].t_truncated, 1e7);
}

TEST(Forward, StepDataIntegratesPiecewise) {
    // tau = 0 then 1: exponential on [0,1), then chordal from phi(1).
    auto G = assemble_field(HerglotzSpec::constant(1.0), DenjoyWolffSpec::step({1.0}, {0.0, 1.0}));
    auto ts = solve_forward(G, 0, 2, SeedGrid::from_points({0.5, cplx(0.2, 0.4)}), 1e-10);
    for (std::size_t j = 0; j < 2; ++j) {
        cplx w = ts.seeds[j] * std::exp(-1.0);
        EXPECT_LT(std::abs(ts.values.back()[j] - chordal(w, 1, 2)), 1e-9);
    }
}

TEST(Reverse, ExponentialClosedForm) {
    auto G = field(HerglotzSpec::constant(1.0), 0.0);
    auto ts = solve_reverse(G, 1, SeedGrid::from_points({0.5, cplx(0, 0.9)}), 1e-10, {0.5});
    ASSERT_EQ(ts.times.front(), 1.0);
    ASSERT_EQ(ts.times.back(), 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_LT(std::abs(ts.values.back()[j] - ts.seeds[j] * std::exp(-1.0)), 1e-9);
        EXPECT_LT(std::abs(ts.values[1][j] - ts.seeds[j] * std::exp(-0.5)), 1e-9);
    }
}

TEST(Reverse, ChordalClosedForm) {
    auto G = field(HerglotzSpec::constant(1.0), 1.0);
    auto ts = solve_reverse(G, 1, SeedGrid::from_points({0.0}), 1e-10);
    EXPECT_NEAR(std::abs(ts.values.back()[0] - cplx(0.5)), 0, 1e-9);
}

TEST(Reverse, ZeroTimeIsIdentity) {
    auto seeds = SeedGrid::circles({0.4}, 8);
    auto ts = solve_reverse(field(HerglotzSpec::becker(0.5), 0.2), 0, seeds);
    ASSERT_EQ(ts.n_times(), 1u);
    for (std::size_t j = 0; j < seeds.size(); ++j) EXPECT_EQ(ts.values[0][j], seeds.points[j]);
}

TEST(Reverse, MatchesForwardFlowForAutonomousData) {
    auto G = field(HerglotzSpec::becker(cplx(0.3, 0.4)), cplx(0.2, 0.1));
    auto seeds = SeedGrid::circles({0.3, 0.7}, 16);
    auto rev = solve_reverse(G, 1.5, seeds, 1e-10);
    auto fwd = solve_forward(G, 0, 1.5, seeds, 1e-10);
    for (std::size_t j = 0; j < seeds.size(); ++j)
        EXPECT_LT(std::abs(rev.values.back()[j] - fwd.values.back()[j]), 1e-9);
}

TEST(Reverse, SemigroupOfReverseFamily) {
    // omega_{s,t} = omega_{s,u} o omega_{u,t}
    auto G = assemble_field(HerglotzSpec::becker(0.5),
                            DenjoyWolffSpec::sampled([](double t) { return cplx(0.3 * std::sin(t), 0.2); }));
    auto seeds = SeedGrid::circles({0.3, 0.7}, 8);
    auto outer = solve_reverse(G, 2, seeds, 1e-10, {1.0});
    std::vector<cplx> mid(outer.values[1].begin(), outer.values[1].end());
    auto inner = solve_reverse(G, 1, SeedGrid::from_points(mid), 1e-10);
    for (std::size_t j = 0; j < seeds.size(); ++j)
        EXPECT_LT(std::abs(inner.values.back()[j] - outer.values.back()[j]), 1e-8);
}

TEST(Semigroup, ExponentialResidualIsTiny) {
    double tol = 1e-9;
    auto r = verify_semigroup(field(HerglotzSpec::constant(1.0), 0.0), 0, 0.5, 1,
                              SeedGrid::circles({0.3, 0.6}, 8), tol);
    EXPECT_LE(r.max_residual, 10 * tol);
    EXPECT_EQ(r.excluded, 0u);
}

TEST(Semigroup, DegenerateCompositionIsExact) {
    auto G = field(HerglotzSpec::becker(0.5), 0.0);
    auto seeds = SeedGrid::circles({0.3, 0.6}, 8);
    EXPECT_LE(verify_semigroup(G, 0, 0, 1, seeds).max_residual, 1e-12);
    EXPECT_LE(verify_semigroup(G, 0, 1, 1, seeds).max_residual, 1e-12);
}

TEST(Semigroup, BeckerSixtyFourSeeds) {
    auto r = verify_semigroup(field(HerglotzSpec::becker(0.5), 0.0), 0, 1, 2,
                              SeedGrid::circles({0.2, 0.4, 0.6, 0.8}, 16), 1e-9);
    EXPECT_LE(r.max_residual, 1e-6);
    EXPECT_EQ(r.used, 64u);
}

TEST(Semigroup, WorkerCountDoesNotChangeResults) {
    auto G = field(HerglotzSpec::becker(cplx(0.2, 0.6)), cplx(0.5, 0.1));
    auto seeds = SeedGrid::circles({0.2, 0.5, 0.8}, 16);
    auto a = solve_forward(G, 0, 2, seeds, 1e-9, {0.5, 1.0}, {default_guard, 1});
    auto b = solve_forward(G, 0, 2, seeds, 1e-9, {0.5, 1.0}, {default_guard, 4});
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.derivs, b.derivs);
}

TEST(SchwarzPick, RotationIsAnIsometry) {
    auto seeds = SeedGrid::from_points({0.1, cplx(0.5, 0.2), cplx(-0.3, 0.7)});
    auto ts = solve_forward(field(HerglotzSpec::constant(cplx(0, 1)), 0.0), 0, 3, seeds, 1e-10,
                            linspace(0, 3, 7));
    auto r = schwarz_pick_check(ts, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_TRUE(r.pass);
    EXPECT_LT(std::abs(r.worst_violation), 1e-9);
}

TEST(SchwarzPick, ExponentialContracts) {
    auto ts = solve_forward(field(HerglotzSpec::constant(1.0), 0.0), 0, 1,
                            SeedGrid::from_points({0.1, 0.5}));
    auto r = schwarz_pick_check(ts, {{0, 1}});
    EXPECT_TRUE(r.pass);
    double d1 = hyperbolic_distance(ts.values.back()[0], ts.values.back()[1]);
    EXPECT_LT(d1, hyperbolic_distance(0.1, 0.5) - 0.1);
}

TEST(SchwarzPick, IdentityStepIsEquality) {
    auto ts = solve_forward(field(HerglotzSpec::constant(1.0), 0.0), 0, 0,
                            SeedGrid::from_points({0.1, 0.5}));
    EXPECT_EQ(schwarz_pick_check(ts, {{0, 1}}).worst_violation, 0.0);
}

TEST(OriginDerivative, ExponentialAndBecker) {
    auto a = derivative_at_origin(field(HerglotzSpec::constant(1.0), 0.0), 1);
    EXPECT_NEAR(std::abs(a.values.back() - std::exp(-1.0)), 0, 1e-9);
    auto b = derivative_at_origin(field(HerglotzSpec::becker(0.5), 0.0), 2);
    EXPECT_NEAR(std::abs(b.values.back() - std::exp(-2.0)), 0, 1e-8);
    ASSERT_TRUE(b.quadrature.has_value());
    EXPECT_LT(b.max_deviation, 1e-8);
    auto c = derivative_at_origin(field(HerglotzSpec::constant(cplx(0, 1)), 0.0), pi);
    EXPECT_NEAR(std::abs(c.values.back()), 1.0, 1e-12);
}

TEST(OriginDerivative, TimeDependentRealPart) {
    auto p = HerglotzSpec::user([](cplx z, double t) { return (1.0 + 0.5 * std::sin(t)) * (1.0 + 0.3 * z) / (1.0 - 0.3 * z); });
    auto d = derivative_at_origin(field(p, 0.0), 8, 1e-10, linspace(0, 8, 17));
    for (std::size_t i = 0; i < d.times.size(); ++i) {
        double t = d.times[i];
        double expected = std::exp(-(t + 0.5 * (1 - std::cos(t))));
        EXPECT_NEAR(std::abs(d.values[i]), expected, 1e-8);
    }
}
