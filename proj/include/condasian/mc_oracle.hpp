#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "condasian/model.hpp"

namespace condasian {

struct PathSample {
    double u = 0.0;    // time above b
    double v = 0.0;    // integral of X over the time above b
    double z = 0.0;    // v / u, NaN when u = 0
    double y = 0.0;    // integral of X
    double x_t = 0.0;  // terminal price
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;       // samples that entered the mean
    std::uint64_t seed = 0;
    long excluded = 0;      // paths dropped because the conditional average is undefined
};

struct McConfig {
    long n_paths = 100000;
    int n_steps = 0;         // 0 selects 250 per unit of time
    std::uint64_t seed = 20240601;
    int threads = 0;
};

// Per-path generator state is derived from (seed, path index), so every path is
// reproducible on its own and results do not depend on the thread count.
// Calls sink(index, sample) for each path; sink may be invoked concurrently.
void simulate(const MarketParams& params, double t, const McConfig& cfg,
              const std::function<void(long, const PathSample&)>& sink);

enum class Payoff { asian_put, conditional_asian_put };

// Discounted payoff mean. For the conditional put, paths that never exceed b have
// no defined average; they are excluded and counted in `excluded`.
McEstimate mc_price(const MarketParams& params, Payoff payoff, const McConfig& cfg);

// E[U], E[V] at an independent exponential horizon with rate s.
std::pair<McEstimate, McEstimate> mc_moments_exponential(const MarketParams& params, double s, const McConfig& cfg);

// Empirical P(Z_T <= z) (conditional average) and P(Y_T/T <= z) on a z grid.
struct McDistribution {
    std::vector<double> z_grid;
    std::vector<McEstimate> g0, gb;
};
McDistribution mc_distribution(const MarketParams& params, double t, const std::vector<double>& z_grid,
                               const McConfig& cfg);

// Deterministic limit sigma = 0 with r < 0 and 0 < b < x: X_t = x e^{rt} reaches b at
// T* = -ln(x/b)/r and U, V freeze afterwards.
int det_g0(double b, double x, double z, double t, double r);
// Unique t0 with (x/(r t0))(e^{r t0} - 1) = z; requires x(e^{rT*}-1)/(rT*) < z < x.
double det_t0(double b, double x, double z, double r);

}  // namespace condasian
