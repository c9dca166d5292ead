#pragma once

#include <vector>

#include "condasian/model.hpp"
#include "condasian/specfun.hpp"

namespace condasian {

// Joint Laplace transform F(b, x, s, alpha, beta) of the occupation time U and the
// price-weighted occupation V above the barrier b, at spot x.

// F1 = x^{-(1+mu)/2} I_lambda(u), F2 = x^{-(1+mu)/2} K_lambda(u), u = (2/sigma) sqrt(2 beta x).
struct OdeSolutionPair {
    cplx f1, f2, f1_deriv, f2_deriv;
};

OdeSolutionPair fundamental_pair(double x, const TransformPoint& tp, const MarketParams& params);

// Y(x) = F(0, x, s, alpha, beta) from the Lommel closed form. Throws a cancellation
// error when the two terms cancel by more than kMaxLossDigits.
constexpr double kMaxLossDigits = 6.0;

struct YEvaluation {
    cplx value, deriv;
    double loss_digits = 0.0;
    bool asymptotic = false;
};

cplx y_open(double x, const TransformPoint& tp, const MarketParams& params);
cplx y_open_deriv(double x, const TransformPoint& tp, const MarketParams& params);
// Both at once, with the cancellation diagnostic; does not throw on loss.
YEvaluation y_open_eval(double x, const TransformPoint& tp, const MarketParams& params);

// Large-tau expansion of Y on the ray alpha = i tau z, beta = -i tau:
// sum_{k=0}^{n} A_k(x) / tau^{k+1}.
cplx y_asymptotic(double x, double z, double tau, cplx s, const MarketParams& params, int order);
cplx y_asymptotic_deriv(double x, double z, double tau, cplx s, const MarketParams& params, int order);

// Coefficient A_k(x) as a rational function: entries c[j][m] of x^j (z-x)^{-m}.
struct AsymptoticCoefficient {
    std::vector<std::vector<cplx>> c;
    cplx eval(double x, double z) const;
    cplx eval_deriv(double x, double z) const;
    cplx eval_deriv2(double x, double z) const;
};
std::vector<AsymptoticCoefficient> y_asymptotic_coefficients(double sigma, double r, cplx s, int order);

// Bound on the part of |Y| + x |Y'| that the asymptotic series misses on the Gurland
// ray: the stationary-phase term from the time the mean path x e^{rt} crosses z, damped
// by the price noise. Zero when the mean path never reaches z.
double y_oscillation_bound(double x, double z, double tau, cplx s, const MarketParams& params);

// Y and Y' at x, switching to the asymptotic expansion on the Gurland ray when
// the closed form loses too many digits or its argument is far outside the
// oscillatory range.
YEvaluation y_value(double x, const TransformPoint& tp, const MarketParams& params);

// Phi(b, x) = [rho (1/s - Y(b)) + b Y'(b)] / [rho F2(b) - b F2'(b)] * F2(x), for b <= x.
cplx phi(double b, double x, const TransformPoint& tp, const MarketParams& params);

struct PhiWithDx {
    cplx value, dx;
};
PhiWithDx phi_with_dx(double b, double x, const TransformPoint& tp, const MarketParams& params);

// Full transform: Phi + Y(x) for x >= b, B x^rho + 1/s for x < b.
cplx f_full(double b, double x, const TransformPoint& tp, const MarketParams& params);

// Large-tau behaviour Phi ~ C tau^{-1/2} exp(-a sqrt(tau)) on the Gurland ray.
struct TailEstimate {
    cplx amplitude;   // C
    cplx decay_a;     // a
    double power = -1.5;

    // Bound for |(1/tau) Im Phi|: |C| tau^{power} exp(-Re(a) sqrt(tau)).
    double envelope(double tau) const;
};

TailEstimate phi_tail(double b, double x, double z, cplx s, const MarketParams& params);

// sigma -> 0 limits (deterministic exponential price path).
cplx y0_limit(double x, cplx s, cplx alpha, cplx beta, double r);
cplx phi0_limit(double b, double x, cplx s, cplx alpha, cplx beta, double r);

}  // namespace condasian
