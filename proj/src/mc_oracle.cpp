#include "condasian/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "condasian/errors.hpp"
#include "condasian/parallel.hpp"

namespace condasian {

namespace {

constexpr long kBlock = 4096;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

boost::random::mt19937_64 path_engine(std::uint64_t seed, long index)
{
    return boost::random::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index))));
}

int steps_for(double t, int n_steps) { return n_steps > 0 ? n_steps : std::max(1, static_cast<int>(std::ceil(250.0 * t))); }

void validate(const MarketParams& p, const McConfig& cfg)
{
    p.validate();
    if (cfg.n_paths < 2) throw NumericalError(ErrorKind::precondition, "Monte Carlo needs at least 2 paths");
    if (cfg.n_steps < 0) throw NumericalError(ErrorKind::precondition, "n_steps must be >= 0");
}

// One exact log-normal path on a uniform grid; the barrier indicator is taken at
// the geometric midpoint of each step, the integrals by the trapezoid rule.
template <class Engine>
PathSample path(const MarketParams& p, double t, int n, Engine& eng)
{
    boost::random::normal_distribution<double> normal;
    const double dt = t / n;
    const double drift = (p.r - 0.5 * p.sigma * p.sigma) * dt, vol = p.sigma * std::sqrt(dt);
    const double two_log_b = p.b > 0.0 ? 2.0 * std::log(p.b) : -std::numeric_limits<double>::infinity();
    double lx = std::log(p.x), x = p.x;
    PathSample s;
    for (int k = 0; k < n; ++k) {
        const double lx1 = lx + drift + vol * normal(eng);
        const double x1 = std::exp(lx1);
        const double area = 0.5 * (x + x1) * dt;
        s.y += area;
        if (lx + lx1 > two_log_b) {
            s.u += dt;
            s.v += area;
        }
        lx = lx1;
        x = x1;
    }
    if (p.b == 0.0) {
        s.u = t;
        s.v = s.y;
    }
    s.x_t = x;
    s.z = s.u > 0.0 ? s.v / s.u : std::numeric_limits<double>::quiet_NaN();
    return s;
}

// Same, up to an exponential horizon; steps of length 1/per_unit plus a final partial step.
template <class Engine>
PathSample path_exponential(const MarketParams& p, double horizon, int per_unit, Engine& eng)
{
    boost::random::normal_distribution<double> normal;
    const double dt0 = 1.0 / per_unit;
    const double mu = p.r - 0.5 * p.sigma * p.sigma;
    const double two_log_b = p.b > 0.0 ? 2.0 * std::log(p.b) : -std::numeric_limits<double>::infinity();
    double lx = std::log(p.x), x = p.x, t = 0.0;
    PathSample s;
    while (t < horizon) {
        const double dt = std::min(dt0, horizon - t);
        const double lx1 = lx + mu * dt + p.sigma * std::sqrt(dt) * normal(eng);
        const double x1 = std::exp(lx1);
        const double area = 0.5 * (x + x1) * dt;
        s.y += area;
        if (p.b == 0.0 || lx + lx1 > two_log_b) {
            s.u += dt;
            s.v += area;
        }
        lx = lx1;
        x = x1;
        t += dt;
    }
    s.x_t = x;
    s.z = s.u > 0.0 ? s.v / s.u : std::numeric_limits<double>::quiet_NaN();
    return s;
}

struct Moments {
    double sum = 0.0, sum2 = 0.0;
    long n = 0, excluded = 0;

    void add(double v)
    {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    void merge(const Moments& o)
    {
        sum += o.sum;
        sum2 += o.sum2;
        n += o.n;
        excluded += o.excluded;
    }
    McEstimate estimate(std::uint64_t seed) const
    {
        McEstimate e;
        e.seed = seed;
        e.n_paths = n;
        e.excluded = excluded;
        if (n == 0) return e;
        e.mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum2 - sum * e.mean) / (n - 1)) : 0.0;
        e.std_error = std::sqrt(var / n);
        return e;
    }
};

// Runs per-block accumulation in parallel and merges blocks in index order.
template <class Acc, class Fn>
Acc run_blocks(long n_paths, int threads, Fn&& per_block)
{
    const long blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<Acc> acc(static_cast<std::size_t>(blocks));
    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t bi) {
        const long lo = static_cast<long>(bi) * kBlock, hi = std::min(n_paths, lo + kBlock);
        per_block(lo, hi, acc[bi]);
    });
    Acc total = acc.empty() ? Acc{} : acc[0];
    for (std::size_t i = 1; i < acc.size(); ++i) total.merge(acc[i]);
    return total;
}

}  // namespace

void simulate(const MarketParams& params, double t, const McConfig& cfg,
              const std::function<void(long, const PathSample&)>& sink)
{
    validate(params, cfg);
    if (!(t > 0.0)) throw NumericalError(ErrorKind::precondition, "simulation horizon must be > 0");
    const int n = steps_for(t, cfg.n_steps);
    const long blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    parallel_for(static_cast<std::size_t>(blocks), cfg.threads, [&](std::size_t bi) {
        const long lo = static_cast<long>(bi) * kBlock, hi = std::min(cfg.n_paths, lo + kBlock);
        for (long i = lo; i < hi; ++i) {
            auto eng = path_engine(cfg.seed, i);
            sink(i, path(params, t, n, eng));
        }
    });
}

McEstimate mc_price(const MarketParams& params, Payoff payoff, const McConfig& cfg)
{
    validate(params, cfg);
    const double T = params.maturity, K = params.strike, disc = std::exp(-params.r * T);
    const int n = steps_for(T, cfg.n_steps);
    const Moments m = run_blocks<Moments>(cfg.n_paths, cfg.threads, [&](long lo, long hi, Moments& acc) {
        for (long i = lo; i < hi; ++i) {
            auto eng = path_engine(cfg.seed, i);
            const PathSample s = path(params, T, n, eng);
            if (payoff == Payoff::asian_put) {
                acc.add(disc * std::max(K - s.y / T, 0.0));
            } else if (s.u > 0.0) {
                acc.add(disc * std::max(K - s.z, 0.0));
            } else {
                ++acc.excluded;
            }
        }
    });
    return m.estimate(cfg.seed);
}

std::pair<McEstimate, McEstimate> mc_moments_exponential(const MarketParams& params, double s, const McConfig& cfg)
{
    validate(params, cfg);
    if (!(s > 0.0)) throw NumericalError(ErrorKind::precondition, "exponential rate s must be > 0");
    const int per_unit = cfg.n_steps > 0 ? cfg.n_steps : 250;
    struct Pair {
        Moments u, v;
        void merge(const Pair& o)
        {
            u.merge(o.u);
            v.merge(o.v);
        }
    };
    const Pair m = run_blocks<Pair>(cfg.n_paths, cfg.threads, [&](long lo, long hi, Pair& acc) {
        for (long i = lo; i < hi; ++i) {
            auto eng = path_engine(cfg.seed, i);
            boost::random::exponential_distribution<double> clock(s);
            const double horizon = clock(eng);
            const PathSample p = path_exponential(params, horizon, per_unit, eng);
            acc.u.add(p.u);
            acc.v.add(p.v);
        }
    });
    return {m.u.estimate(cfg.seed), m.v.estimate(cfg.seed)};
}

McDistribution mc_distribution(const MarketParams& params, double t, const std::vector<double>& z_grid,
                               const McConfig& cfg)
{
    validate(params, cfg);
    const int n = steps_for(t, cfg.n_steps);
    struct Counts {
        std::vector<Moments> g0, gb;
        void merge(const Counts& o)
        {
            for (std::size_t j = 0; j < g0.size(); ++j) {
                g0[j].merge(o.g0[j]);
                gb[j].merge(o.gb[j]);
            }
        }
    };
    Counts c = run_blocks<Counts>(cfg.n_paths, cfg.threads, [&](long lo, long hi, Counts& acc) {
        acc.g0.assign(z_grid.size(), {});
        acc.gb.assign(z_grid.size(), {});
        for (long i = lo; i < hi; ++i) {
            auto eng = path_engine(cfg.seed, i);
            const PathSample s = path(params, t, n, eng);
            for (std::size_t j = 0; j < z_grid.size(); ++j) {
                acc.g0[j].add(s.y / t <= z_grid[j] ? 1.0 : 0.0);
                if (s.u > 0.0)
                    acc.gb[j].add(s.z <= z_grid[j] ? 1.0 : 0.0);
                else
                    ++acc.gb[j].excluded;
            }
        }
    });
    McDistribution d;
    d.z_grid = z_grid;
    for (std::size_t j = 0; j < z_grid.size(); ++j) {
        d.g0.push_back(c.g0[j].estimate(cfg.seed));
        d.gb.push_back(c.gb[j].estimate(cfg.seed));
    }
    return d;
}

namespace {

void require_deterministic_setting(double b, double x, double r)
{
    if (!(r < 0.0)) throw NumericalError(ErrorKind::precondition, "deterministic limit needs r < 0");
    if (!(b > 0.0 && b < x)) throw NumericalError(ErrorKind::precondition, "deterministic limit needs 0 < b < x");
}

// (x/(r t))(e^{rt} - 1), the running average of x e^{rt}.
double running_average(double x, double r, double t)
{
    const double rt = r * t;
    return std::abs(rt) < 1e-12 ? x * (1.0 + 0.5 * rt) : x * std::expm1(rt) / rt;
}

}  // namespace

int det_g0(double b, double x, double z, double t, double r)
{
    require_deterministic_setting(b, x, r);
    if (!(t > 0.0)) throw NumericalError(ErrorKind::precondition, "t must be > 0");
    const double t_star = -std::log(x / b) / r;
    return running_average(x, r, std::min(t, t_star)) <= z ? 1 : 0;
}

double det_t0(double b, double x, double z, double r)
{
    require_deterministic_setting(b, x, r);
    const double t_star = -std::log(x / b) / r;
    const double lo_value = running_average(x, r, t_star);
    if (!(z > lo_value && z < x))
        throw NumericalError(ErrorKind::root_bracket, "t0 exists only for " + std::to_string(lo_value) + " < z < " +
                                                          std::to_string(x) + "; got z=" + std::to_string(z));
    // The running average decreases strictly from x at t=0 to lo_value at T*.
    double lo = 0.0, hi = t_star;
    while (hi - lo > 1e-13 * std::max(1.0, t_star)) {
        const double mid = 0.5 * (lo + hi);
        (running_average(x, r, mid) > z ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace condasian
