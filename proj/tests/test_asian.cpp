#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "condasian/asian.hpp"
#include "condasian/errors.hpp"
#include "condasian/inversion.hpp"
#include "condasian/model.hpp"

using namespace condasian;

namespace {

MarketParams unit_maturity()
{
    MarketParams p;
    p.r = 0.05;
    p.sigma = 0.5;
    p.maturity = 1.0;
    p.x = 2.0;
    p.strike = 2.0;
    return p;
}

}  // namespace

TEST(Model, DerivedConstants)
{
    const Dimensionless d = derive(0.05, 0.5);
    EXPECT_NEAR(d.nu, -0.6, 1e-15);
    EXPECT_NEAR(d.mu, -1.6, 1e-15);
    EXPECT_NEAR(d.kappa, 0.8, 1e-15);
    EXPECT_NEAR(derive(0.125, 0.5).nu, 0.0, 1e-15);
    EXPECT_NEAR(derive(0.25, 0.5).mu, 0.0, 1e-15);
}

TEST(Model, ValidationRejectsBadParameters)
{
    MarketParams p;
    p.sigma = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.b = 3.0;
    EXPECT_NO_THROW(p.validate());
    EXPECT_THROW(p.validate_conditional(), ConfigError);
}

TEST(Model, RhoSolvesIndicialEquation)
{
    const double r = 0.05, sigma = 0.5;
    const Dimensionless d = derive(r, sigma);
    for (double s : {0.01, 0.1, std::numbers::ln2 / 5, 1.0, 5.0}) {
        const SpectralConstants c = spectral(d, sigma, s, 0.0);
        const cplx rho = c.rho;
        const cplx resid = 0.5 * sigma * sigma * rho * (rho - 1.0) + r * rho - s;
        EXPECT_LT(std::abs(resid), 1e-12 * s) << "s=" << s;
        EXPECT_GT(c.lambda0.real(), std::abs(d.mu + 1.0));
        EXPECT_EQ(c.lambda, c.lambda0);
    }
    EXPECT_NEAR(spectral(d, sigma, std::numbers::ln2 / 5, 0.0).rho.real(), 1.3950047894397140, 1e-13);
}

TEST(Model, RhoIncreasesWithS)
{
    const Dimensionless d = derive(0.05, 0.4);
    double prev = -1.0;
    for (double s = 0.05; s <= 10.0; s += 0.05) {
        const double rho = spectral(d, 0.4, s, 0.0).rho.real();
        EXPECT_GT(rho, prev);
        prev = rho;
    }
}

TEST(Model, EtaKappaIdentity)
{
    for (double nu : {-0.6, 0.0, 1.5}) {
        const Dimensionless d{nu, nu - 1.0, 0.5 * (1.0 - nu)};
        for (double s : {0.3, 1.0, 4.0}) {
            const double eta = 0.5 * std::sqrt(2.0 * s + nu * nu);
            EXPECT_NEAR(2.0 * (eta + d.kappa - 0.5) * (eta - d.kappa + 0.5), s, 1e-13);
        }
    }
}

TEST(FKappa, WhittakerClosedForm)
{
    for (double y : {0.1, 0.5, 2.0}) {
        const double w = 1.0 / (4.0 * y);
        EXPECT_NEAR(f_kappa(0.0, y, 0.5).real(), 2.0 * std::exp(-w) * std::sinh(w), 1e-13);
    }
}

TEST(FKappa, Reference)
{
    const double eta = 0.5 * std::sqrt(2.0 + 0.36);
    EXPECT_NEAR(f_kappa(0.8, 0.5, eta).real(), 0.78853234764421393, 1e-12);
    EXPECT_LT(std::abs(f_kappa(0.8, 1e4, eta)), 1e-3);
    EXPECT_TRUE(std::isfinite(std::abs(f_kappa(0.8, 1e-4, eta))));
}

TEST(AsianTransforms, References)
{
    const Dimensionless d = derive(0.05, 0.5);
    const Dimensionless d0{0.0, -1.0, 0.5};
    EXPECT_NEAR(ptilde0(1.0, 0.25, d0).real(), 0.93224055636838392, 1e-12);
    EXPECT_NEAR(ptilde_big0(1.0, 0.5, d).real(), 0.55939126313151192, 1e-12);
    EXPECT_NEAR(qtilde0(1.0, 0.5, d).real(), 0.15459736843281507, 1e-12);
}

TEST(AsianTransforms, TotalProbability)
{
    const Dimensionless d = derive(0.05, 0.5);
    // The approach to 1/s is algebraic in y, so "infinity" has to be far out.
    for (double s : {0.5, 1.0, 2.0, 5.0}) EXPECT_NEAR(ptilde_big0(s, 1e16, d).real() * s, 1.0, 1e-10) << s;
    // For small y the integral stays below y for a time of order y.
    EXPECT_NEAR(ptilde_big0(1.0, 1e-4, d).real() / 1e-4, 1.0, 1e-3);
}

TEST(AsianTransforms, MonotoneAndConvex)
{
    const Dimensionless d = derive(0.05, 0.5);
    double p_prev = 0.0, q_prev = 0.0, dq_prev = 0.0;
    for (int i = 1; i <= 60; ++i) {
        const double y = 0.05 * i;
        const double p = ptilde_big0(1.0, y, d).real(), q = qtilde0(1.0, y, d).real();
        EXPECT_GE(p, p_prev - 1e-14);
        EXPECT_GE(q, q_prev);
        EXPECT_GE(q - q_prev, dq_prev - 1e-12);
        dq_prev = q - q_prev;
        p_prev = p;
        q_prev = q;
    }
    // Q grows like y/s.
    const double slope = (qtilde0(1.0, 2e9, d) - qtilde0(1.0, 1e9, d)).real() / 1e9;
    EXPECT_NEAR(slope, 1.0, 1e-8);
}

TEST(AsianTransforms, PtildeDxMatchesFiniteDifference)
{
    MarketParams p = unit_maturity();
    for (double y : {0.5, 2.0, 4.0}) {
        const double h = 1e-5 * p.x;
        MarketParams up = p, dn = p;
        up.x += h;
        dn.x -= h;
        const cplx fd = (ptilde_physical(up, 1.0, y) - ptilde_physical(dn, 1.0, y)) / (2.0 * h);
        const cplx an = ptilde_dx(p, 1.0, y);
        EXPECT_LT(std::abs(an - fd), 1e-8 * std::abs(an)) << y;
        EXPECT_LT(an.real(), 0.0);
    }
}

TEST(AsianPut, ReferenceCallPrice)
{
    const MarketParams p = unit_maturity();
    const double call = asian_call_via_parity(p, asian_put_price(p));
    EXPECT_NEAR(call, 0.2464156819, 5e-7);
}

TEST(AsianPut, DeltaMatchesFiniteDifference)
{
    MarketParams p = unit_maturity();
    const double h = 1e-4;
    MarketParams up = p, dn = p;
    up.x += h;
    dn.x -= h;
    const double fd = (asian_put_price(up) - asian_put_price(dn)) / (2.0 * h);
    EXPECT_NEAR(asian_put_delta(p), fd, 1e-5);
}

TEST(AsianPut, TinyStrikeHasNoValue)
{
    MarketParams p = unit_maturity();
    p.strike = 0.2;
    EXPECT_NEAR(asian_put_price(p), 0.0, 1e-8);
    EXPECT_NEAR(asian_put_delta(p), 0.0, 1e-6);
}

TEST(AsianPut, ParityAtZeroRate)
{
    MarketParams p = unit_maturity();
    p.r = 0.0;
    EXPECT_NEAR(asian_call_via_parity(p, 0.1), 0.1 + p.x - p.strike, 1e-14);
}

TEST(G0Distribution, Limits)
{
    MarketParams p = unit_maturity();
    p.maturity = 5.0;
    EXPECT_NEAR(g0_distribution(p, 1e-3, 5.0), 0.0, 1e-7);
    EXPECT_NEAR(g0_distribution(p, 200.0, 5.0), 1.0, 1e-6);
    double prev = 0.0;
    for (double z = 0.25; z <= 4.0; z += 0.25) {
        const double g = g0_distribution(p, z, 5.0);
        EXPECT_GE(g, prev - 1e-9);
        prev = g;
    }
}

TEST(Inversion, GaverStehfestWeights)
{
    const auto w1 = gs_weights(1);
    ASSERT_EQ(w1.size(), 2u);
    EXPECT_DOUBLE_EQ(w1[0], 2.0);
    EXPECT_DOUBLE_EQ(w1[1], -2.0);
    for (int m = 3; m <= 7; ++m) {
        double sum = 0.0;
        for (double w : gs_weights(m)) sum += w;
        EXPECT_NEAR(sum, 0.0, 1e-6);
    }
}

TEST(Inversion, GaverStehfestKnownTransforms)
{
    // 1/s is reproduced exactly; the other two carry the intrinsic M = 5 truncation error,
    // pinned here from an extended-precision evaluation of the same weights.
    for (double t : {1.0, 5.0}) EXPECT_NEAR(invert_gs([](double s) { return 1.0 / s; }, t, 5), 1.0, 1e-10);
    EXPECT_NEAR(invert_gs([](double s) { return 1.0 / (s + 1.0); }, 1.0, 5), 0.36778826976876606, 1e-10);
    EXPECT_NEAR(invert_gs([](double s) { return 1.0 / (s + 1.0); }, 5.0, 5), 0.0064451708722382848, 1e-10);
    EXPECT_NEAR(invert_gs([](double s) { return 1.0 / (s * s); }, 1.0, 5), 1.000034791653241, 1e-10);
    EXPECT_NEAR(invert_gs([](double s) { return 1.0 / (s * s); }, 5.0, 5), 5.0001739582662048, 1e-9);
}

TEST(Inversion, GaverStehfestErrorShrinksWithM)
{
    double prev = 1.0;
    for (int m = 3; m <= 7; ++m) {
        const double err = std::abs(invert_gs([](double s) { return 1.0 / (s + 1.0); }, 1.0, m) - std::exp(-1.0));
        EXPECT_LT(err, prev) << m;
        prev = err;
    }
}

TEST(Inversion, EulerKnownTransforms)
{
    EXPECT_NEAR(invert_euler([](cplx s) { return 1.0 / (s + 1.0); }, 1.0), std::exp(-1.0), 1e-9);
    EXPECT_NEAR(invert_euler([](cplx s) { return 1.0 / (s * s + 1.0); }, 2.0), std::sin(2.0), 1e-8);
}

TEST(Inversion, SpecValidation)
{
    InversionSpec s;
    s.gs_terms = 2;
    EXPECT_THROW(s.validate(), ConfigError);
    s.gs_terms = 5;
    EXPECT_NO_THROW(s.validate());
    EXPECT_NEAR(s.tolerance(), 1e-11, 1e-20);
}
