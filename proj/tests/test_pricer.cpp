#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "condasian/asian.hpp"
#include "condasian/errors.hpp"
#include "condasian/joint.hpp"
#include "condasian/pricer.hpp"

using namespace condasian;

namespace {

MarketParams five_year(double sigma)
{
    MarketParams p;
    p.sigma = sigma;
    return p;
}

const double kFirstNode = std::numbers::ln2 / 5.0;

}  // namespace

TEST(GurlandIntegrand, SmallTauLimit)
{
    const MarketParams p = five_year(0.4);
    const double s = 0.5, z = 1.5;
    const double limit = gurland_integrand(1.0, 2.0, z, s, 1e-6, p);
    const double direct = phi(1.0, 2.0, TransformPoint::gurland(s, 1e-6, z), p).imag() / 1e-6;
    EXPECT_NEAR(limit, direct, 1e-4 * std::abs(direct));
    // Continuous across the switch to the limit value.
    EXPECT_NEAR(gurland_integrand(1.0, 2.0, z, s, 0.99e-4, p), gurland_integrand(1.0, 2.0, z, s, 1.01e-4, p),
                1e-4 * std::abs(limit));
}

TEST(GurlandIntegrand, VanishesWithBarrier)
{
    const MarketParams p = five_year(0.4);
    for (double tau : {1e-3, 0.5, 20.0}) {
        const double full = std::abs(gurland_integrand(1.0, 2.0, 1.5, 0.5, tau, p));
        EXPECT_LT(std::abs(gurland_integrand(1e-6, 2.0, 1.5, 0.5, tau, p)), 1e-4 * full) << tau;
    }
}

TEST(GurlandIntegrand, BelowTailEnvelope)
{
    const MarketParams p = five_year(0.4);
    for (double z : {1.2, 1.5, 1.9}) {
        const TailEstimate t = phi_tail(1.0, 2.0, z, kFirstNode, p);
        for (double tau : {1e3, 3e3, 1e4})
            EXPECT_LE(std::abs(gurland_integrand(1.0, 2.0, z, kFirstNode, tau, p)), 2.0 * t.envelope(tau))
                << z << " " << tau;
    }
}

TEST(GurlandIntegrand, DxMatchesFiniteDifference)
{
    const MarketParams p = five_year(0.4);
    const double h = 1e-6;
    for (double tau : {0.3, 5.0, 60.0}) {
        const GurlandSample g = gurland_integrand_with_dx(1.0, 2.0, 1.5, 0.5, tau, p);
        const double fd =
            (gurland_integrand(1.0, 2.0 + h, 1.5, 0.5, tau, p) - gurland_integrand(1.0, 2.0 - h, 1.5, 0.5, tau, p)) /
            (2.0 * h);
        EXPECT_NEAR(g.dx, fd, 1e-6 * std::max(1.0, std::abs(fd))) << tau;
    }
}

TEST(GurlandIntegrand, Preconditions)
{
    const MarketParams p = five_year(0.4);
    EXPECT_THROW(gurland_integrand(1.0, 2.0, 0.9, 0.5, 1.0, p), NumericalError);
    EXPECT_THROW(gurland_integrand(2.5, 2.0, 3.0, 0.5, 1.0, p), NumericalError);
}

TEST(Dhat, ReproducibleBitForBit)
{
    const MarketParams p = five_year(0.4);
    const DhatResult a = dhat_with_dx(1.0, 2.0, 1.5, kFirstNode, p, 1e-11, false);
    const DhatResult b = dhat_with_dx(1.0, 2.0, 1.5, kFirstNode, p, 1e-11, false);
    EXPECT_TRUE(std::isfinite(a.value));
    EXPECT_EQ(std::memcmp(&a.value, &b.value, sizeof(double)), 0);
    EXPECT_LT(a.error_estimate, 1e-11);
    EXPECT_GT(a.cutoff, 0.0);
    EXPECT_TRUE(a.endpoint_limit_used);
}

TEST(Dhat, NoBlowUpJustAboveBarrier)
{
    // The approach to z = b is smooth: difference quotients stay of the same size as the step shrinks.
    const MarketParams p = five_year(0.4);
    const double d3 = dhat(1.0, 2.0, 1.0 + 1e-3, kFirstNode, p, 1e-10);
    const double d4 = dhat(1.0, 2.0, 1.0 + 1e-4, kFirstNode, p, 1e-10);
    const double d5 = dhat(1.0, 2.0, 1.0 + 1e-5, kFirstNode, p, 1e-10);
    ASSERT_TRUE(std::isfinite(d5));
    const double q1 = (d3 - d4) / 9e-4, q2 = (d4 - d5) / 9e-5;
    EXPECT_LT(std::abs(q2), 2.0 * std::abs(q1));
    EXPECT_GT(std::abs(q2), 0.5 * std::abs(q1));
}

TEST(Dhat, ReducedEndpointAccuracyWhenSBelowRate)
{
    MarketParams p = five_year(0.4);
    p.r = 0.3;
    const DhatResult d = dhat_with_dx(1.0, 2.0, 1.5, 0.2, p, 1e-9, false);
    EXPECT_TRUE(std::isfinite(d.value));
    EXPECT_FALSE(d.endpoint_limit_used);
}

TEST(DValue, SeamContinuity)
{
    const MarketParams p = five_year(0.4);
    const double at_seam = d_value(1.0, 2.0, 1.0, 5.0, p);
    EXPECT_NEAR(at_seam, g0_distribution(p, 1.0, 5.0), 1e-14);
    EXPECT_NEAR(d_value(1.0, 2.0, 1.0 + 1e-6, 5.0, p), at_seam, 2e-4);
}

TEST(DValue, VanishesWithBarrier)
{
    MarketParams p = five_year(0.4);
    p.b = 1e-3;
    EXPECT_LT(std::abs(d_value(1e-3, 2.0, 1.5, 5.0, p)), 1e-5);
}

TEST(GCurve, InvariantsAndThreadIndependence)
{
    const MarketParams p = five_year(0.4);
    const std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
    const DistributionCurve one = g_curve(p, 5.0, grid, {}, 1);
    const DistributionCurve many = g_curve(p, 5.0, grid, {}, 3);
    EXPECT_TRUE(check_curve(one, 1.0, 1e-6).empty());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(std::memcmp(&one.d[i], &many.d[i], sizeof(double)), 0) << i;
        EXPECT_LE(one.gb[i], one.g0[i] + 1e-12);
        if (grid[i] <= 1.0) EXPECT_NEAR(one.gb[i], 0.0, 1e-12);
    }
}

TEST(GCurve, CheckCurveFlagsViolations)
{
    DistributionCurve c;
    c.z_grid = {0.5, 1.5, 2.0};
    c.g0 = {0.1, 0.6, 0.5};
    c.d = {0.1, -0.1, 0.2};
    c.gb = {0.0, 0.7, 0.3};
    EXPECT_GE(check_curve(c, 1.0, 1e-9).size(), 3u);
}

TEST(Spread, GridPreconditions)
{
    const MarketParams p = five_year(0.4);
    EXPECT_THROW(spread(p, {}, 0.3), NumericalError);
    MarketParams off = p;
    off.b = 1.05;
    EXPECT_THROW(spread(off, {}, 0.1), NumericalError);
}

TEST(Spread, HalvingStepChangesLittle)
{
    MarketParams p = five_year(0.4);
    p.b = 1.2;
    p.strike = 1.5;
    PricerOptions coarse, fine;
    fine.z_step = 0.05;
    const Valuation a = value_conditional_put(p, coarse, false);
    const Valuation b = value_conditional_put(p, fine, false);
    EXPECT_NEAR(a.price.spread, b.price.spread, 5e-4);
    EXPECT_GE(a.price.spread, 0.0);
    EXPECT_LE(a.price.ap_b, a.price.ap0);
    EXPECT_DOUBLE_EQ(a.price.ap_b, a.price.ap0 - a.price.spread);
    EXPECT_EQ(a.gurland_integrals, 30u);
}

TEST(G0Gurland, MatchesEulerRoute)
{
    // Two independent routes to G(0, 2, 1.5, 5): Gurland integral of Y with Gaver-Stehfest,
    // and Euler inversion of the plain Asian transform.
    const MarketParams p = five_year(0.4);
    const double gurland = g_value_gurland(0.0, 2.0, 1.5, 5.0, p);
    EXPECT_NEAR(gurland, g0_distribution(p, 1.5, 5.0), 2e-5);
    EXPECT_NEAR(g_value_gurland(1.0, 2.0, 1.5, 5.0, p), gurland - d_value(1.0, 2.0, 1.5, 5.0, p), 1e-9);
}

TEST(G0Gurland, Preconditions)
{
    const MarketParams p = five_year(0.4);
    EXPECT_THROW(g0hat_gurland(2.0, 2.0, 0.5, p, 1e-9), NumericalError);
    EXPECT_THROW(g0hat_gurland(2.0, 1.5, 0.01, p, 1e-9), NumericalError);
    EXPECT_EQ(ghat(1.0, 2.0, 0.9, 0.5, p, 1e-9), 0.0);
}
