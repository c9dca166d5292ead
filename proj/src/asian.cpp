#include "condasian/asian.hpp"

#include <cmath>
#include <string>

#include "condasian/errors.hpp"

namespace condasian {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_positive_y(double y)
{
    if (!(y > 0.0)) throw NumericalError(ErrorKind::precondition, "transform level y must be > 0");
}

struct GammaParts {
    cplx eta, a, c;     // a = eta + kappa - 1/2, c = eta - kappa + 1/2
    cplx log_ratio;     // log[Gamma(c) / Gamma(1 + 2 eta)] - kappa log 2
};

GammaParts gamma_parts(cplx s, const Dimensionless& dim)
{
    GammaParts g;
    g.eta = 0.5 * std::sqrt(2.0 * s + dim.nu * dim.nu);
    g.a = g.eta + dim.kappa - 0.5;
    g.c = g.eta - dim.kappa + 0.5;
    g.log_ratio = log_gamma(g.c) - log_gamma(1.0 + 2.0 * g.eta) - dim.kappa * kLn2;
    return g;
}

}  // namespace

Scaled f_kappa_scaled(double kappa_eff, double y, cplx eta)
{
    require_positive_y(y);
    const double w = 0.5 / y;
    // y^{-k} e^{-w/2} M_{k,eta}(w) with M_{k,eta}(w) = e^{-w/2} w^{eta+1/2} M(eta-k+1/2, 1+2eta, w)
    const Scaled m = kummer_m_scaled(eta - kappa_eff + 0.5, 1.0 + 2.0 * eta, w, tight_control());
    return m * Scaled::from_log(-kappa_eff * std::log(y) - w + (eta + 0.5) * std::log(w));
}

cplx f_kappa(double kappa_eff, double y, cplx eta) { return f_kappa_scaled(kappa_eff, y, eta).value(); }

cplx ptilde0(cplx s, double y, const Dimensionless& dim)
{
    const GammaParts g = gamma_parts(s, dim);
    return (Scaled::from_log(g.log_ratio) * f_kappa_scaled(dim.kappa, y, g.eta)).value();
}

cplx ptilde_big0(cplx s, double y, const Dimensionless& dim)
{
    const GammaParts g = gamma_parts(s, dim);
    const Scaled tail = Scaled::from_log(g.log_ratio) * f_kappa_scaled(dim.kappa - 1.0, y, g.eta);
    return 1.0 / (2.0 * g.a * g.c) - tail.value() / g.a;
}

cplx qtilde0(cplx s, double y, const Dimensionless& dim)
{
    const GammaParts g = gamma_parts(s, dim);
    const cplx a3 = g.eta + dim.kappa - 1.5, c3 = g.eta - dim.kappa + 1.5;
    const Scaled tail = Scaled::from_log(g.log_ratio) * f_kappa_scaled(dim.kappa - 2.0, y, g.eta);
    return y / (2.0 * g.a * g.c) - 1.0 / (4.0 * g.a * a3 * c3 * g.c) + tail.value() / (g.a * a3);
}

cplx ptilde_physical(const MarketParams& p, cplx s, double y)
{
    const double k = 4.0 / (p.sigma * p.sigma);
    return k * ptilde_big0(k * s, y / (k * p.x), derive(p));
}

cplx qtilde_physical(const MarketParams& p, cplx s, double y)
{
    const double k = 4.0 / (p.sigma * p.sigma);
    return k * k * p.x * qtilde0(k * s, y / (k * p.x), derive(p));
}

cplx ptilde_dx(const MarketParams& p, cplx s, double y)
{
    // P(x,t,y) = P0(t/k, y/(k x)) with k = 4/sigma^2; the time scaling factor k
    // cancels against the chain-rule factor 1/k.
    const double k = 4.0 / (p.sigma * p.sigma);
    return -(y / (p.x * p.x)) * ptilde0(k * s, y / (k * p.x), derive(p));
}

cplx qtilde_dx(const MarketParams& p, cplx s, double y)
{
    const double k = 4.0 / (p.sigma * p.sigma);
    const Dimensionless dim = derive(p);
    const double yy = y / (k * p.x);
    return k * k * qtilde0(k * s, yy, dim) - (y / p.x) * k * ptilde_big0(k * s, yy, dim);
}

double asian_put_price(const MarketParams& p, const InversionSpec& inv)
{
    p.validate();
    const double T = p.maturity, y = T * p.strike;
    const double q = invert_euler([&](cplx s) { return qtilde_physical(p, s, y); }, T, inv);
    return std::exp(-p.r * T) * q / T;
}

double asian_call_via_parity(const MarketParams& p, double put)
{
    const double rT = p.r * p.maturity;
    const double growth = std::abs(rT) < 1e-8 ? 1.0 + 0.5 * rT : std::expm1(rT) / rT;
    return put + std::exp(-rT) * (p.x * growth - p.strike);
}

double asian_put_delta(const MarketParams& p, const InversionSpec& inv)
{
    p.validate();
    const double T = p.maturity, y = T * p.strike;
    const double dq = invert_euler([&](cplx s) { return qtilde_dx(p, s, y); }, T, inv);
    return std::exp(-p.r * T) * dq / T;
}

double g0_distribution(const MarketParams& p, double z, double t, const InversionSpec& inv)
{
    if (z < 0.0 || !(t > 0.0)) throw NumericalError(ErrorKind::precondition, "g0_distribution needs z >= 0, t > 0");
    if (z == 0.0) return 0.0;
    const double v = invert_euler([&](cplx s) { return ptilde_physical(p, s, t * z); }, t, inv);
    if (v < 0.0 || v > 1.0) {
        const double over = v < 0.0 ? -v : v - 1.0;
        if (over >= 1e-6)
            throw NumericalError(ErrorKind::clamp_violation,
                                 "distribution value " + std::to_string(v) + " outside [0, 1] at z=" + std::to_string(z));
        return v < 0.0 ? 0.0 : 1.0;
    }
    return v;
}

double g0_distribution_dx(const MarketParams& p, double z, double t, const InversionSpec& inv)
{
    if (z < 0.0 || !(t > 0.0)) throw NumericalError(ErrorKind::precondition, "g0_distribution_dx needs z >= 0, t > 0");
    if (z == 0.0) return 0.0;
    return invert_euler([&](cplx s) { return ptilde_dx(p, s, t * z); }, t, inv);
}

}  // namespace condasian
