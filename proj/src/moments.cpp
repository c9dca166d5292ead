#include "condasian/moments.hpp"

#include <cmath>
#include <string>

#include "condasian/errors.hpp"
#include "condasian/joint.hpp"

namespace condasian {

namespace {

struct Exponents {
    double mu, lambda0, rho;
};

Exponents exponents(const MarketParams& p, double s)
{
    if (!(s > 0.0) || !(s > p.r))
        throw NumericalError(ErrorKind::precondition,
                             "moments need s > max(r, 0); got s=" + std::to_string(s) + ", r=" + std::to_string(p.r));
    const double mu = derive(p).mu;
    const double l0 = std::sqrt((mu + 1.0) * (mu + 1.0) + 8.0 * s / (p.sigma * p.sigma));
    return {mu, l0, -0.5 * (mu + 1.0) + 0.5 * l0};
}

}  // namespace

MomentSet mean_uv(const MarketParams& p, double s, double z)
{
    const Exponents e = exponents(p, s);
    MomentSet m;
    if (p.x >= p.b) {
        const double ratio = p.b > 0.0 ? std::pow(p.x / p.b, -0.5 * (e.mu + e.lambda0 + 1.0)) : 0.0;
        m.mean_v = p.b * (e.rho - 1.0) / ((p.r - s) * e.lambda0) * ratio - p.x / (p.r - s);
        m.mean_u = 1.0 / s - e.rho / (e.lambda0 * s) * ratio;
    } else {
        const double ratio = std::pow(p.x / p.b, e.rho);
        m.mean_v = p.b * (e.mu + e.lambda0 + 3.0) / (2.0 * (s - p.r) * e.lambda0) * ratio;
        m.mean_u = (e.mu + e.lambda0 + 1.0) / (2.0 * e.lambda0 * s) * ratio;
    }
    m.e1 = e1_coefficient(p, s, z);
    return m;
}

cplx e1_coefficient(const MarketParams& p, double s, double z)
{
    const Exponents e = exponents(p, s);
    const cplx i(0.0, 1.0);
    const double c = p.b / (p.r - s) + z / s;
    if (p.x >= p.b) {
        const double ratio = p.b > 0.0 ? std::pow(p.x / p.b, -0.5 * (e.mu + e.lambda0 + 1.0)) : 0.0;
        return i * (c * e.rho - p.b / (p.r - s)) / e.lambda0 * ratio - i * (p.x / (p.r - s) + z / s);
    }
    const double ratio = std::pow(p.x / p.b, e.rho);
    return -i * (c * 0.5 * (e.mu + e.lambda0 + 1.0) + p.b / (p.r - s)) / e.lambda0 * ratio;
}

cplx e_coefficient_numeric(const MarketParams& p, double s, double z, int k, double h)
{
    if (k != 1 && k != 2) throw NumericalError(ErrorKind::precondition, "numeric E_k supports k = 1, 2");
    auto psi = [&](double tau) {
        const TransformPoint tp{cplx(s, 0.0), cplx(0.0, tau * z), cplx(0.0, -tau)};
        return s * f_full(p.b, p.x, tp, p);
    };
    const cplx f0 = psi(0.0);
    auto diff = [&](double step) {
        const cplx fp = psi(step), fm = psi(-step);
        return k == 1 ? (fp - fm) / (2.0 * step) : (fp - 2.0 * f0 + fm) / (2.0 * step * step);
    };
    // Both stencils have an h^2 leading error.
    const cplx d1 = diff(h), d2 = diff(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace condasian
