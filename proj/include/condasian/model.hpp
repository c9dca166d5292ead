#pragma once

#include "condasian/specfun.hpp"

namespace condasian {

struct MarketParams {
    double r = 0.05;
    double sigma = 0.4;
    double x = 2.0;         // spot
    double b = 1.0;         // observation barrier
    double strike = 2.0;
    double maturity = 5.0;

    // Throws ConfigError naming the violated invariant.
    void validate() const;
    // Additionally requires b < strike.
    void validate_conditional() const;
};

struct Dimensionless {
    double nu;     // 2r/sigma^2 - 1
    double mu;     // 2r/sigma^2 - 2
    double kappa;  // (1 - nu)/2
};

Dimensionless derive(double r, double sigma);
Dimensionless derive(const MarketParams& params);

// Laplace variable s (time), alpha (dual to U) and beta (dual to V).
struct TransformPoint {
    cplx s, alpha, beta;

    // Point on the inversion ray: alpha = i tau z, beta = -i tau.
    static TransformPoint gurland(double s, double tau, double z);
};

struct SpectralConstants {
    cplx eta;      // sqrt(2s + nu^2)/2
    cplx lambda;   // sqrt((mu+1)^2 + 8 (s + alpha)/sigma^2)
    cplx lambda0;  // lambda at alpha = 0
    cplx rho;      // -(mu+1)/2 + lambda0/2
};

SpectralConstants spectral(const Dimensionless& dim, double sigma, cplx s, cplx alpha);

}  // namespace condasian
