#include <gtest/gtest.h>

#include <random>

#include "loewner/herglotz.hpp"

using namespace loewner;

namespace {

std::vector<double> times_on(double a, double b, std::size_t n) { return linspace(a, b, n); }

}  // namespace

TEST(Field, ExponentialValue) {
    auto G = assemble_field(HerglotzSpec::constant(1.0), DenjoyWolffSpec::constant(0.0));
    EXPECT_NEAR(std::abs(G(0.5, 0.0) - cplx(-0.5)), 0.0, 1e-15);
}

TEST(Field, ChordalValue) {
    auto G = assemble_field(HerglotzSpec::constant(1.0), DenjoyWolffSpec::constant(1.0));
    EXPECT_NEAR(std::abs(G(0.0, 0.0) - cplx(1.0)), 0.0, 1e-15);
}

TEST(Field, VanishesExactlyAtInteriorDenjoyWolffPoint) {
    auto G = assemble_field(HerglotzSpec::becker(0.5), DenjoyWolffSpec::constant(0.3));
    EXPECT_EQ(G(0.3, 0.7), cplx(0.0));
}

TEST(Field, RejectsModulusAboveOne) {
    try {
        assemble_field(HerglotzSpec::constant(1.0),
                       DenjoyWolffSpec::sampled([](double t) { return cplx(0.5 + 0.2 * t); }));
        FAIL() << "expected ModulusError";
    } catch (const ModulusError& e) {
        EXPECT_GT(e.time, 2.5 - 0.05);
        EXPECT_LT(e.time, 2.5 + 0.05);
    }
    EXPECT_THROW(DenjoyWolffSpec::step({1.0}, {0.2, cplx(1.1)}), ModulusError);
}

TEST(Field, StepDataIsRightContinuous) {
    auto tau = DenjoyWolffSpec::step({1.0, 2.0}, {0.0, 0.5, cplx(0, 0.5)});
    EXPECT_EQ(tau(0.999), cplx(0.0));
    EXPECT_EQ(tau(1.0), cplx(0.5));
    EXPECT_EQ(tau(2.5), cplx(0, 0.5));
    EXPECT_EQ(tau.on_segment(1.0, 0.5), cplx(0.0));
    EXPECT_EQ(tau.breakpoints(), (std::vector<double>{1.0, 2.0}));
    EXPECT_THROW(DenjoyWolffSpec::step({2.0, 1.0}, {0.0, 0.1, 0.2}), Error);
    EXPECT_THROW(DenjoyWolffSpec::step({1.0}, {0.0}), Error);
}

TEST(Field, DerivativeMatchesProductRule) {
    auto G = assemble_field(HerglotzSpec::becker(0.5), DenjoyWolffSpec::constant(cplx(0.2, -0.1)));
    cplx z(0.3, 0.4);
    double h = 1e-6;
    cplx fd = (G(z + h, 0.0) - G(z - h, 0.0)) / (2 * h);
    EXPECT_LT(std::abs(G.dz(z, 0.0, 0.0) - fd), 1e-8);
}

TEST(Kinds, MobiusKernelHasPositiveRealPart) {
    auto p = HerglotzSpec::mobius_kernel([](double t) { return std::polar(1.0, t); });
    cplx k = std::polar(1.0, 0.3);
    EXPECT_LT(std::abs(p(0.0, 0.3) - cplx(1.0)), 1e-15);
    EXPECT_LT(std::abs(p(0.5, 0.3) - (k + 0.5) / (k - 0.5)), 1e-15);
    auto r = check_herglotz(p, DiskGrid::standard(), times_on(0, 2, 5));
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.value, 0.0);
}

TEST(Kinds, SectorValuesStayInSector) {
    double k = 0.4;
    auto p = HerglotzSpec::sector(k, [](double) { return std::polar(1.0, 0.1); }, 0.2);
    for (cplx z : DiskGrid::standard().points())
        EXPECT_LE(std::abs(std::arg(p(z, 0.0))), k * pi / 2 + 1e-12);
    EXPECT_THROW(HerglotzSpec::sector(1.0, [](double) { return cplx(1.0); }), Error);
}

TEST(Kinds, UserSampledInterpolatesLinearly) {
    auto p = HerglotzSpec::user_sampled({{0.0, 1.0}, {1.0, cplx(3.0, 2.0)}});
    EXPECT_LT(std::abs(p(0.7, 0.5) - cplx(2.0, 1.0)), 1e-15);
    EXPECT_LT(std::abs(p(0.0, 5.0) - cplx(3.0, 2.0)), 1e-15);
}

TEST(Kinds, RationalTableInterpolatesCoefficients) {
    HerglotzSpec::RationalTable r{{0.0, 1.0}, {{1.0, 0.0}, {1.0, 0.5}}, {{1.0, 0.0}, {1.0, -0.5}}};
    auto p = HerglotzSpec::rational_table(r);
    cplx z(0.2, 0.1);
    EXPECT_LT(std::abs(p(z, 0.5) - (1.0 + 0.25 * z) / (1.0 - 0.25 * z)), 1e-15);
}

TEST(Herglotz, ConstantOnePasses) {
    auto r = check_herglotz(HerglotzSpec::constant(1.0), DiskGrid::standard(), {0.0, 1.0});
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.value, 1.0);
}

TEST(Herglotz, ImaginaryConstantSitsOnTheBoundary) {
    auto r = check_herglotz(HerglotzSpec::constant(cplx(0, 1)), DiskGrid::standard(), {0.0, 1.0});
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.value, 0.0);
}

TEST(Herglotz, NegativeValueFailsAtEveryTime) {
    auto r = check_herglotz(HerglotzSpec::constant(-0.01), DiskGrid::standard(), {0.0, 1.0, 2.0});
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.failing_times.size(), 3u);
}

TEST(Herglotz, NonFiniteSamplesFail) {
    auto p = HerglotzSpec::user([](cplx, double) { return cplx(qnan, 0); });
    auto r = check_herglotz(p, DiskGrid::standard(), {0.0, 1.0});
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.nonfinite, 0u);
}

TEST(Herglotz, IsolatedFailureIsOnlyAWarning) {
    auto p = HerglotzSpec::user([](cplx, double t) { return cplx(t == 1.0 ? -1.0 : 1.0); });
    auto r = check_herglotz(p, DiskGrid::standard(), {0.0, 1.0, 2.0});
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.warnings.size(), 1u);
    auto q = HerglotzSpec::user([](cplx, double t) { return cplx(t >= 1.0 ? -1.0 : 1.0); });
    EXPECT_FALSE(check_herglotz(q, DiskGrid::standard(), {0.0, 1.0, 2.0}).pass);
}

TEST(Becker, ExtremalFunctionAttainsCTimesRmax) {
    for (double c : {0.3, 0.5, 0.8}) {
        auto g = DiskGrid::standard();
        auto r = check_becker(HerglotzSpec::becker(c), g, {0.0}, c);
        EXPECT_NEAR(r.value, c * g.r_max(), 1e-10);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Becker, ConstantOneHasRatioZero) {
    auto r = check_becker(HerglotzSpec::constant(1.0), DiskGrid::standard(), {0.0}, 0.0);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.pass);
}

TEST(Becker, ImaginaryConstantHasRatioOne) {
    auto r = check_becker(HerglotzSpec::constant(cplx(0, 1)), DiskGrid::standard(), {0.0, 1.0}, 0.99);
    EXPECT_NEAR(r.value, 1.0, 1e-15);
    EXPECT_FALSE(r.pass);
}

TEST(Becker, MinusOneGivesInfiniteRatio) {
    auto r = check_becker(HerglotzSpec::constant(-1.0), DiskGrid::standard(), {0.0}, 0.5);
    EXPECT_TRUE(std::isinf(r.value));
    EXPECT_FALSE(r.pass);
}

TEST(Pair, EqualSectorValuesGiveSine) {
    auto p = HerglotzSpec::constant(std::polar(1.0, pi / 6));
    auto r = check_pair(p, p, DiskGrid::standard(), {0.0}, sector_bound(1.0 / 3));
    EXPECT_NEAR(r.value, 0.5, 1e-15);
    EXPECT_NEAR(sector_bound(1.0 / 3), 0.5, 1e-15);
    EXPECT_TRUE(r.pass);
}

TEST(Pair, OneAndIGiveRatioOne) {
    auto r = check_pair(HerglotzSpec::constant(1.0), HerglotzSpec::constant(cplx(0, 1)),
                        DiskGrid::standard(), {0.0}, 0.5);
    EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(Pair, ZeroOverZeroIsSkipped) {
    auto r = check_pair(HerglotzSpec::constant(cplx(0, 1)), HerglotzSpec::constant(cplx(0, -1)),
                        DiskGrid{{0.5}, 4}, {0.0}, 0.5);
    EXPECT_EQ(r.skipped, 4u);
    EXPECT_EQ(r.value, 0.0);
    auto s = check_pair(HerglotzSpec::constant(1.0), HerglotzSpec::constant(-1.0), DiskGrid{{0.5}, 4},
                        {0.0}, 0.5);
    EXPECT_TRUE(std::isinf(s.value));
}

TEST(Pair, BeckerIsThePairWithQEqualOne) {
    auto p = HerglotzSpec::becker(0.5);
    auto a = check_pair(p, HerglotzSpec::constant(1.0), DiskGrid::standard(), {0.0}, 0.5);
    auto b = check_becker(p, DiskGrid::standard(), {0.0}, 0.5);
    EXPECT_NEAR(a.value, b.value, 1e-15);
}

TEST(Cayley, TransferAndInverse) {
    HerglotzSpec p = HerglotzSpec::user([](cplx z, double) { return (1.0 + z) / (1.0 - z); });
    auto ph = cayley_transfer(p);
    EXPECT_LT(std::abs(ph(3.0, 0.0) - cplx(6.0)), 1e-14);
    EXPECT_THROW(ph(-1.0, 0.0), DomainError);
    auto back = cayley_inverse(ph);
    for (cplx z : DiskGrid{{0.3, 0.9}, 16}.points()) EXPECT_LT(std::abs(back(z, 0.0) - p(z, 0.0)), 1e-12);
    auto one = cayley_transfer(HerglotzSpec::constant(1.0));
    EXPECT_EQ(one(cplx(2.0, 5.0), 0.0), cplx(2.0));
}

TEST(Holomorphy, BuiltInKindsPass) {
    auto g = DiskGrid::standard();
    std::vector<double> t{0.0, 0.5};
    EXPECT_TRUE(check_holomorphy(HerglotzSpec::becker(0.5), g, t).pass);
    EXPECT_TRUE(check_holomorphy(HerglotzSpec::becker(0.9), g, t).pass);
    EXPECT_TRUE(check_holomorphy(HerglotzSpec::mobius_kernel([](double s) { return std::polar(1.0, s); }), g, t).pass);
    EXPECT_TRUE(check_holomorphy(HerglotzSpec::sector(0.6, [](double) { return cplx(1.0); }, 0.5), g, t).pass);
    EXPECT_TRUE(check_holomorphy(HerglotzSpec::user_sampled({{0.0, 1.0}, {1.0, 2.0}}), g, t).pass);
    auto bad = HerglotzSpec::user([](cplx z, double) { return cplx(1.0) + std::conj(z) * 0.1; });
    EXPECT_FALSE(check_holomorphy(bad, g, t).pass);
}

TEST(Degeneracy, ImaginaryDataHasZeroHorizon) {
    auto g = DiskGrid{{0.5, 0.9}, 16};
    auto times = times_on(0, 2, 9);
    EXPECT_EQ(real_part_horizon(HerglotzSpec::constant(cplx(0, 1)), g, times), 0.0);
    EXPECT_GT(real_part_horizon(HerglotzSpec::constant(1.0), g, times), 0.0);
}

TEST(Herglotz, RandomBeckerDataRespectsBound) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.95);
    for (int i = 0; i < 20; ++i) {
        double k = u(rng);
        auto p = HerglotzSpec::becker(std::polar(k, 6 * u(rng)));
        EXPECT_TRUE(check_herglotz(p, DiskGrid::standard(), {0.0}).pass);
        EXPECT_TRUE(check_becker(p, DiskGrid::standard(), {0.0}, k).pass);
    }
}
