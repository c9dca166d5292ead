#pragma once

#include "condasian/inversion.hpp"
#include "condasian/model.hpp"
#include "condasian/specfun.hpp"

namespace condasian {

// Transforms for the time-changed process with unit volatility scale:
// s is the Laplace variable of time sigma^2 t / 4, y the running integral level.

// y^{-k} e^{-1/(4y)} M_{k,eta}(1/(2y)), k in {kappa, kappa-1, kappa-2}.
cplx f_kappa(double kappa_eff, double y, cplx eta);
Scaled f_kappa_scaled(double kappa_eff, double y, cplx eta);

// Density, distribution and integrated distribution transforms of the integral.
cplx ptilde0(cplx s, double y, const Dimensionless& dim);
cplx ptilde_big0(cplx s, double y, const Dimensionless& dim);
cplx qtilde0(cplx s, double y, const Dimensionless& dim);

// Transforms in physical time t, at spot x and level y.
cplx ptilde_physical(const MarketParams& params, cplx s, double y);  // of P(x,t,y)
cplx qtilde_physical(const MarketParams& params, cplx s, double y);  // of Q(x,t,y)
cplx ptilde_dx(const MarketParams& params, cplx s, double y);        // of dP/dx
cplx qtilde_dx(const MarketParams& params, cplx s, double y);        // of dQ/dx

// Fixed-strike arithmetic Asian put with continuous averaging.
double asian_put_price(const MarketParams& params, const InversionSpec& inv = {});
double asian_call_via_parity(const MarketParams& params, double put);
double asian_put_delta(const MarketParams& params, const InversionSpec& inv = {});

// P(average over [0,t] <= z), i.e. G(0, x, z, t).
double g0_distribution(const MarketParams& params, double z, double t, const InversionSpec& inv = {});
// d/dx of the same.
double g0_distribution_dx(const MarketParams& params, double z, double t, const InversionSpec& inv = {});

}  // namespace condasian
