#include "condasian/model.hpp"

#include <cmath>

#include "condasian/errors.hpp"

namespace condasian {

namespace {

void require(bool ok, const char* what)
{
    if (!ok) throw ConfigError(what);
}

}  // namespace

void MarketParams::validate() const
{
    require(std::isfinite(r), "r must be finite");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma > 0");
    require(std::isfinite(x) && x > 0.0, "x > 0");
    require(std::isfinite(b) && b >= 0.0, "b >= 0");
    require(std::isfinite(strike) && strike > 0.0, "strike > 0");
    require(std::isfinite(maturity) && maturity > 0.0, "maturity > 0");
}

void MarketParams::validate_conditional() const
{
    validate();
    require(b < strike, "b < strike");
}

Dimensionless derive(double r, double sigma)
{
    const double q = 2.0 * r / (sigma * sigma);
    return {q - 1.0, q - 2.0, (2.0 - q) / 2.0};
}

Dimensionless derive(const MarketParams& params) { return derive(params.r, params.sigma); }

TransformPoint TransformPoint::gurland(double s, double tau, double z)
{
    return {cplx(s, 0.0), cplx(0.0, tau * z), cplx(0.0, -tau)};
}

SpectralConstants spectral(const Dimensionless& dim, double sigma, cplx s, cplx alpha)
{
    const double m1 = dim.mu + 1.0;
    const double k = 8.0 / (sigma * sigma);
    SpectralConstants c;
    c.eta = 0.5 * std::sqrt(2.0 * s + dim.nu * dim.nu);
    c.lambda = std::sqrt(m1 * m1 + k * (s + alpha));
    c.lambda0 = std::sqrt(m1 * m1 + k * s);
    c.rho = -0.5 * m1 + 0.5 * c.lambda0;
    return c;
}

}  // namespace condasian
