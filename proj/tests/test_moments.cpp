#include <gtest/gtest.h>

#include <cmath>

#include "condasian/errors.hpp"
#include "condasian/joint.hpp"
#include "condasian/model.hpp"
#include "condasian/moments.hpp"

using namespace condasian;

namespace {

MarketParams market(double sigma, double x, double b)
{
    MarketParams p;
    p.r = 0.05;
    p.sigma = sigma;
    p.x = x;
    p.b = b;
    return p;
}

}  // namespace

TEST(MeanUV, References)
{
    // Complex-step derivatives of the joint transform in extended precision.
    const MomentSet above = mean_uv(market(0.5, 2.0, 1.0), 1.0);
    EXPECT_NEAR(above.mean_u, 0.90524321479319401, 1e-13);
    EXPECT_NEAR(above.mean_v, 2.037241407786462, 1e-12);
    const MomentSet below = mean_uv(market(0.5, 0.8, 1.0), 1.0);
    EXPECT_NEAR(below.mean_u, 0.22174271283158561, 1e-13);
    EXPECT_NEAR(below.mean_v, 0.32515337609717919, 1e-13);
}

TEST(MeanUV, VanishingBarrier)
{
    const double s = 0.7;
    const MomentSet m = mean_uv(market(0.4, 2.0, 1e-9), s);
    EXPECT_NEAR(m.mean_u, 1.0 / s, 1e-8);
    EXPECT_NEAR(m.mean_v, 2.0 / (s - 0.05), 1e-8);
}

TEST(MeanUV, BranchesAgreeAtBarrier)
{
    for (double s : {0.2, 1.0, 3.0}) {
        const MomentSet at = mean_uv(market(0.4, 1.0, 1.0), s);
        const MomentSet below = mean_uv(market(0.4, 1.0 - 1e-13, 1.0), s);
        EXPECT_NEAR(at.mean_u, below.mean_u, 1e-12);
        EXPECT_NEAR(at.mean_v, below.mean_v, 1e-12);
    }
}

TEST(MeanUV, Ranges)
{
    for (double x : {0.5, 1.0, 2.0, 4.0})
        for (double s : {0.1, 1.0}) {
            const MomentSet m = mean_uv(market(0.4, x, 1.0), s);
            EXPECT_GT(m.mean_u, 0.0);
            EXPECT_LE(m.mean_u, 1.0 / s);
            EXPECT_GT(m.mean_v, 0.0);
        }
}

TEST(MeanUV, RequiresSAboveRate)
{
    try {
        mean_uv(market(0.4, 2.0, 1.0), 0.04);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
    }
}

TEST(E1, ConsistentWithMeans)
{
    for (double x : {0.6, 1.0, 2.0})
        for (double z : {0.5, 1.5, 3.0}) {
            const MarketParams p = market(0.4, x, 1.0);
            const MomentSet m = mean_uv(p, 0.8, z);
            const cplx expected{0.0, m.mean_v - z * m.mean_u};
            EXPECT_LT(std::abs(e1_coefficient(p, 0.8, z) - expected), 1e-10 * std::abs(expected));
            EXPECT_LT(std::abs(m.e1 - expected), 1e-10 * std::abs(expected));
        }
}

TEST(E1, VanishesAtCenteredStrike)
{
    const MarketParams p = market(0.4, 2.0, 1.0);
    const MomentSet m = mean_uv(p, 0.5);
    EXPECT_LT(std::abs(e1_coefficient(p, 0.5, m.mean_v / m.mean_u)), 1e-13);
}

TEST(E1, SmallTauLimitOfTransform)
{
    // Points with s > 2r + sigma^2, where W has a second moment and the limit is approached linearly.
    struct Case {
        double sigma, x, z, s;
    };
    for (const Case c : {Case{0.4, 2.0, 1.5, 0.5}, Case{0.4, 0.8, 1.5, 0.7}, Case{0.6, 2.0, 1.2, 1.0},
                         Case{0.2, 3.0, 2.5, 0.3}, Case{0.5, 1.2, 1.8, 2.0}}) {
        const MarketParams p = market(c.sigma, c.x, 1.0);
        const double tau = 1e-6;
        const cplx f = f_full(1.0, c.x, TransformPoint::gurland(c.s, tau, c.z), p);
        const double numeric = c.s / tau * f.imag();
        const double exact = (e1_coefficient(p, c.s, c.z) / cplx(0.0, 1.0)).real();
        EXPECT_NEAR(numeric, exact, 1e-4 * std::abs(exact)) << c.sigma << " " << c.x << " " << c.z << " " << c.s;
    }
}

TEST(E1, HeavyTailSlowsTheLimit)
{
    // Below s = 2r + sigma^2 the gap closes like tau^(rho - 1) instead of tau.
    const MarketParams p = market(0.4, 2.0, 1.0);
    const double s = 0.2, z = 1.5;
    const double rho = spectral(derive(p), p.sigma, s, 0.0).rho.real();
    ASSERT_LT(rho, 2.0);
    const double exact = (e1_coefficient(p, s, z) / cplx(0.0, 1.0)).real();
    auto gap = [&](double tau) {
        return std::abs(s / tau * f_full(1.0, 2.0, TransformPoint::gurland(s, tau, z), p).imag() - exact);
    };
    const double rate = std::log10(gap(1e-5) / gap(1e-6));
    EXPECT_NEAR(rate, rho - 1.0, 0.05);
}

TEST(E1, NumericDerivativeFallback)
{
    const MarketParams p = market(0.4, 2.0, 1.0);
    const cplx numeric = e_coefficient_numeric(p, 2.0, 1.5, 1);
    const cplx exact = e1_coefficient(p, 2.0, 1.5);
    EXPECT_LT(std::abs(numeric - exact), 1e-5 * std::abs(exact));
}
