#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <vector>

#include "condasian/asian.hpp"
#include "condasian/errors.hpp"
#include "condasian/mc_oracle.hpp"
#include "condasian/moments.hpp"
#include "condasian/pricer.hpp"

using namespace condasian;

namespace {

MarketParams unit_maturity()
{
    MarketParams p;
    p.r = 0.05;
    p.sigma = 0.5;
    p.maturity = 1.0;
    return p;
}

McConfig paths(long n, std::uint64_t seed = 7)
{
    McConfig c;
    c.n_paths = n;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Simulate, DeterministicLimit)
{
    MarketParams p;
    p.r = -0.2;
    p.sigma = 1e-8;
    p.x = 2.0;
    p.b = 1.5;
    const double t = 3.0, t_star = -std::log(p.x / p.b) / p.r;
    McConfig c = paths(4);
    c.n_steps = 3000;
    const double dt = t / c.n_steps;
    simulate(p, t, c, [&](long, const PathSample& s) {
        EXPECT_NEAR(s.u, t_star, dt);
        EXPECT_NEAR(s.v, p.x / p.r * std::expm1(p.r * t_star), p.x * dt);
    });
}

TEST(Simulate, ZeroBarrierCoversWholePath)
{
    MarketParams p = unit_maturity();
    p.b = 0.0;
    simulate(p, 1.0, paths(64), [&](long, const PathSample& s) {
        EXPECT_DOUBLE_EQ(s.u, 1.0);
        EXPECT_DOUBLE_EQ(s.v, s.y);
    });
}

TEST(Simulate, PathwiseInvariants)
{
    MarketParams p;
    std::atomic<long> violations{0}, dominance{0};
    const double T = p.maturity;
    simulate(p, T, paths(100000), [&](long, const PathSample& s) {
        if (s.u > T + 1e-12 || s.v > s.y + 1e-12) ++violations;
        if (s.u > 0.0) {
            if (!(s.z > p.b)) ++violations;
            if (std::max(p.strike - s.z, 0.0) > std::max(p.strike - s.y / T, 0.0)) ++dominance;
        }
    });
    EXPECT_EQ(violations.load(), 0);
    EXPECT_EQ(dominance.load(), 0);
}

TEST(Simulate, MeanOfIntegral)
{
    const MarketParams p = unit_maturity();
    std::vector<double> y(50000);
    simulate(p, 1.0, paths(50000), [&](long i, const PathSample& s) { y[i] = s.y; });
    double m = 0.0, m2 = 0.0;
    for (double v : y) {
        m += v;
        m2 += v * v;
    }
    m /= y.size();
    const double se = std::sqrt((m2 / y.size() - m * m) / y.size());
    EXPECT_NEAR(m, p.x * std::expm1(p.r) / p.r, 3.0 * se);
}

TEST(McPrice, IndependentOfThreadCount)
{
    const MarketParams p = unit_maturity();
    McConfig a = paths(20000), b = paths(20000);
    a.threads = 1;
    b.threads = 4;
    const McEstimate x = mc_price(p, Payoff::asian_put, a), y = mc_price(p, Payoff::asian_put, b);
    EXPECT_EQ(std::memcmp(&x.mean, &y.mean, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&x.std_error, &y.std_error, sizeof(double)), 0);
    EXPECT_GT(x.std_error, 0.0);
    EXPECT_EQ(x.seed, 7u);
}

TEST(McPrice, MatchesAnalyticAsianPut)
{
    const MarketParams p = unit_maturity();
    const McEstimate mc = mc_price(p, Payoff::asian_put, paths(200000));
    EXPECT_NEAR(mc.mean, asian_put_price(p), 3.0 * mc.std_error);
}

TEST(McPrice, StrikeBelowBarrierPaysNothing)
{
    MarketParams p = unit_maturity();
    p.b = 1.0;
    p.strike = 0.9;
    const McEstimate mc = mc_price(p, Payoff::conditional_asian_put, paths(5000));
    EXPECT_DOUBLE_EQ(mc.mean, 0.0);
}

TEST(McPrice, ConvergesAtSquareRootRate)
{
    const MarketParams p = unit_maturity();
    const double exact = asian_put_price(p);
    std::vector<double> log_n, log_err;
    for (long n : {1000L, 10000L, 100000L}) {
        double sq = 0.0;
        const int seeds = 32;
        for (int k = 0; k < seeds; ++k) {
            McConfig c = paths(n, 1000 + k);
            c.n_steps = 50;
            const double e = mc_price(p, Payoff::asian_put, c).mean - exact;
            sq += e * e;
        }
        log_n.push_back(std::log10(static_cast<double>(n)));
        log_err.push_back(0.5 * std::log10(sq / seeds));
    }
    const double slope = (log_err.back() - log_err.front()) / (log_n.back() - log_n.front());
    EXPECT_NEAR(slope, -0.5, 0.1);
}

TEST(McMoments, MatchClosedFormBothBranches)
{
    for (double x : {2.0, 0.8}) {
        MarketParams p = unit_maturity();
        p.x = x;
        p.b = 1.0;
        const auto [u, v] = mc_moments_exponential(p, 1.0, paths(100000));
        const MomentSet m = mean_uv(p, 1.0);
        EXPECT_NEAR(u.mean, m.mean_u, 3.0 * u.std_error) << x;
        EXPECT_NEAR(v.mean, m.mean_v, 3.0 * v.std_error) << x;
    }
}

TEST(McMoments, ZeroBarrier)
{
    MarketParams p = unit_maturity();
    p.b = 0.0;
    const auto [u, v] = mc_moments_exponential(p, 2.0, paths(50000));
    EXPECT_NEAR(u.mean, 0.5, 3.0 * u.std_error);
}

TEST(McDistribution, MatchesAnalyticCurves)
{
    MarketParams p;
    p.sigma = 0.5;
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(0.3 * i);
    const McDistribution mc = mc_distribution(p, 5.0, grid, paths(100000));
    const DistributionCurve an = g_curve(p, 5.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double se0 = std::max(mc.g0[i].std_error, 1e-5), seb = std::max(mc.gb[i].std_error, 1e-5);
        EXPECT_NEAR(mc.g0[i].mean, an.g0[i], 3.0 * se0) << grid[i];
        EXPECT_NEAR(mc.gb[i].mean, an.gb[i], 3.0 * seb) << grid[i];
    }
}

TEST(McDistribution, SpreadOfDistributionsAtMidStrike)
{
    MarketParams p;
    p.sigma = 0.4;
    McConfig c = paths(100000);
    std::vector<double> d(c.n_paths);
    simulate(p, 5.0, c, [&](long i, const PathSample& s) {
        const bool below0 = s.y / 5.0 <= 1.5, belowb = s.u > 0.0 && s.z <= 1.5;
        d[i] = (below0 ? 1.0 : 0.0) - (belowb ? 1.0 : 0.0);
    });
    double m = 0.0, m2 = 0.0;
    for (double v : d) {
        m += v;
        m2 += v * v;
    }
    m /= d.size();
    const double se = std::sqrt((m2 / d.size() - m * m) / d.size());
    EXPECT_NEAR(m, d_value(1.0, 2.0, 1.5, 5.0, p), 3.0 * se);
}

TEST(Deterministic, G0Indicator)
{
    EXPECT_EQ(det_g0(1.0, 2.0, 2.0, 0.5, -0.2), 1);
    EXPECT_EQ(det_g0(1.0, 2.0, 2.5, 3.0, -0.2), 1);
    EXPECT_EQ(det_g0(1.0, 2.0, 1.9, 0.01, -0.2), 0);
}

TEST(Deterministic, T0LaplaceIdentity)
{
    const double b = 1.0, x = 2.0, r = -0.2, z = 1.7, s = 0.8;
    const double t0 = det_t0(b, x, z, r);
    EXPECT_NEAR(x * std::expm1(r * t0) / (r * t0), z, 1e-12);
    // Midpoint rule over [0, 60]; the indicator switches once, at t0.
    const int n = 600000;
    const double h = 60.0 / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * h;
        acc += std::exp(-s * t) * det_g0(b, x, z, t, r) * h;
    }
    EXPECT_NEAR(acc, std::exp(-s * t0) / s, 2e-5);
}

TEST(Deterministic, T0OutsideBracket)
{
    try {
        det_t0(1.0, 2.0, 2.1, -0.2);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::root_bracket);
    }
    EXPECT_THROW(det_t0(1.0, 2.0, 1.0, -0.2), NumericalError);
    EXPECT_THROW(det_t0(1.0, 2.0, 1.5, 0.1), NumericalError);
}
