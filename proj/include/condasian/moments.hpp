#pragma once

#include "condasian/model.hpp"
#include "condasian/specfun.hpp"

namespace condasian {

// First moments of (U, V) at an independent exponential horizon with rate s, and
// the first coefficient of s F(b, x, s, i tau z, -i tau) = E0 + E1 tau + ...
struct MomentSet {
    double mean_u = 0.0;  // E[U_{T_s}]
    double mean_v = 0.0;  // E[V_{T_s}]
    cplx e1;              // E1 at the requested z
};

// Requires s > r and s > 0.
MomentSet mean_uv(const MarketParams& params, double s, double z = 0.0);
cplx e1_coefficient(const MarketParams& params, double s, double z);

// E_k by Richardson-extrapolated central differences of s F in tau (k = 1 or 2).
// Slow; meant for cross-checks.
cplx e_coefficient_numeric(const MarketParams& params, double s, double z, int k, double h = 1e-3);

}  // namespace condasian
