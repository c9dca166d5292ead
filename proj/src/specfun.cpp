#include "condasian/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "condasian/errors.hpp"

namespace condasian {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_nonpositive_integer(cplx z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

[[noreturn]] void throw_non_convergence(const char* what, int terms, double last)
{
    throw NumericalError(ErrorKind::non_convergence, std::string(what) + " series: " + std::to_string(terms) +
                                                         " terms, last increment " + std::to_string(last));
}

}  // namespace

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::pole: return "pole";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::zero_argument: return "zero argument";
    case ErrorKind::cancellation: return "cancellation";
    case ErrorKind::excluded_point: return "excluded point";
    case ErrorKind::precondition: return "precondition violated";
    case ErrorKind::inversion_failure: return "inversion failure";
    case ErrorKind::clamp_violation: return "clamp violation";
    case ErrorKind::turning_point: return "turning point";
    case ErrorKind::truncation: return "truncation bound";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::root_bracket: return "root bracket";
    case ErrorKind::denominator: return "vanishing denominator";
    }
    return "error";
}

void SeriesControl::validate() const
{
    if (max_terms < 16) throw NumericalError(ErrorKind::precondition, "SeriesControl.max_terms must be >= 16");
    if (!(abs_tol > 0.0 && abs_tol < 1.0) || !(rel_tol > 0.0 && rel_tol < 1.0))
        throw NumericalError(ErrorKind::precondition, "SeriesControl tolerances must lie in (0, 1)");
}

SeriesControl tight_control() { return SeriesControl{4000, 1e-300, 1e-17}; }

double SeriesResult::loss_digits() const
{
    const double v = std::abs(value);
    if (v == 0.0) return largest_term > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::max(0.0, std::log10(largest_term / v));
}

// ---------------------------------------------------------------------------
// Scaled

Scaled Scaled::from_log(cplx log_value)
{
    return {std::polar(1.0, log_value.imag()), log_value.real()};
}

cplx Scaled::value() const
{
    if (is_zero()) return {0.0, 0.0};
    return mant * std::exp(log_scale);
}

cplx Scaled::log() const { return std::log(mant) + log_scale; }

double Scaled::log_abs() const
{
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mant)) + log_scale;
}

namespace {

Scaled normalized(cplx m, double scale)
{
    const double a = std::abs(m);
    if (a == 0.0 || !std::isfinite(a)) return {m, a == 0.0 ? 0.0 : scale};
    const double l = std::log(a);
    return {m / a, scale + l};
}

}  // namespace

Scaled operator*(const Scaled& a, const Scaled& b) { return normalized(a.mant * b.mant, a.log_scale + b.log_scale); }

Scaled operator/(const Scaled& a, const Scaled& b)
{
    if (b.is_zero()) throw NumericalError(ErrorKind::denominator, "division by zero");
    return normalized(a.mant / b.mant, a.log_scale - b.log_scale);
}

Scaled operator*(const Scaled& a, cplx b) { return normalized(a.mant * b, a.log_scale); }

Scaled operator+(const Scaled& a, const Scaled& b)
{
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double d = b.log_scale - a.log_scale;
    if (d > 0.0) return normalized(a.mant * std::exp(-d) + b.mant, b.log_scale);
    return normalized(a.mant + b.mant * std::exp(d), a.log_scale);
}

Scaled operator-(const Scaled& a, const Scaled& b) { return a + Scaled{-b.mant, b.log_scale}; }

// ---------------------------------------------------------------------------
// Gamma

cplx log_gamma(cplx z)
{
    if (is_nonpositive_integer(z))
        throw NumericalError(ErrorKind::pole, "log_gamma at nonpositive integer " + std::to_string(z.real()));
    if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);

    // Shift up by recurrence; the imaginary part sums the arguments so the
    // branch is the continuous one.
    cplx prod(1.0, 0.0);
    double arg_sum = 0.0;
    while (std::abs(z) < 16.0) {
        prod *= z;
        arg_sum += std::arg(z);
        z += 1.0;
    }
    const cplx shift(std::log(std::abs(prod)), arg_sum);
    static constexpr double c[] = {1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0,    -1.0 / 1680.0,
                                   1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};
    const cplx w = 1.0 / z, w2 = w * w;
    cplx sum(0.0, 0.0), p = w;
    for (double ck : c) {
        sum += ck * p;
        p *= w2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + sum - shift;
}

// ---------------------------------------------------------------------------
// Hypergeometric series

SeriesResult hyp1f2(cplx b1, cplx b2, cplx z, const SeriesControl& ctl)
{
    return hyp1f2(cplx(1.0, 0.0), b1, b2, z, ctl);
}

SeriesResult hyp1f2(cplx a, cplx b1, cplx b2, cplx z, const SeriesControl& ctl)
{
    ctl.validate();
    if (is_nonpositive_integer(b1) || is_nonpositive_integer(b2))
        throw NumericalError(ErrorKind::pole, "1F2 denominator parameter is a nonpositive integer");
    SeriesResult r;
    cplx t(1.0, 0.0);
    r.value = t;
    r.largest_term = 1.0;
    const double az = std::abs(z);
    for (int k = 1; k <= ctl.max_terms; ++k) {
        const double km1 = k - 1.0;
        t *= (a + km1) * z / ((b1 + km1) * (b2 + km1) * static_cast<double>(k));
        r.value += t;
        const double at = std::abs(t);
        if (!std::isfinite(at)) throw_non_convergence("1F2", k, at);
        r.largest_term = std::max(r.largest_term, at);
        r.terms = k;
        const bool decaying = std::abs((a + static_cast<double>(k)) * az) <
                              0.5 * std::abs((b1 + static_cast<double>(k)) * (b2 + static_cast<double>(k))) *
                                  (k + 1.0);
        if (decaying && (at <= ctl.abs_tol || at <= ctl.rel_tol * std::abs(r.value))) return r;
        if (t == cplx(0.0, 0.0)) return r;
    }
    throw_non_convergence("1F2", ctl.max_terms, std::abs(t));
}

Scaled kummer_m_scaled(cplx a, cplx b, cplx z, const SeriesControl& ctl)
{
    ctl.validate();
    if (is_nonpositive_integer(b)) throw NumericalError(ErrorKind::pole, "Kummer M with b a nonpositive integer");
    // Running rescale keeps the partial sums finite for large |z|.
    cplx t(1.0, 0.0), s = t;
    double scale = 0.0;
    const double az = std::abs(z);
    const int kmax = std::max(ctl.max_terms, static_cast<int>(4.0 * az) + 100);
    for (int k = 1; k <= kmax; ++k) {
        const double km1 = k - 1.0;
        t *= (a + km1) * z / ((b + km1) * static_cast<double>(k));
        s += t;
        if (std::abs(s) > 1e150) {
            s *= 1e-150;
            t *= 1e-150;
            scale += 150.0 * std::log(10.0);
        }
        const double at = std::abs(t);
        const bool decaying = std::abs((a + static_cast<double>(k)) * az) <
                              0.5 * std::abs(b + static_cast<double>(k)) * (k + 1.0);
        if (decaying && at <= ctl.rel_tol * std::abs(s)) return Scaled{s, scale} * cplx(1.0, 0.0);
        if (t == cplx(0.0, 0.0)) return Scaled{s, scale} * cplx(1.0, 0.0);
    }
    throw_non_convergence("Kummer M", kmax, std::abs(t));
}

cplx kummer_m(cplx a, cplx b, cplx z, const SeriesControl& ctl) { return kummer_m_scaled(a, b, z, ctl).value(); }

Scaled whittaker_m_scaled(cplx kappa, cplx eta, cplx z, const SeriesControl& ctl)
{
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw NumericalError(ErrorKind::precondition, "Whittaker M on the negative real axis");
    const Scaled m = kummer_m_scaled(eta - kappa + 0.5, 1.0 + 2.0 * eta, z, ctl);
    return m * Scaled::from_log(-0.5 * z + (eta + 0.5) * std::log(z));
}

cplx whittaker_m(cplx kappa, cplx eta, cplx z) { return whittaker_m_scaled(kappa, eta, z).value(); }

cplx lommel_t(double mu, cplx lambda, cplx z)
{
    const cplx b1 = 0.5 * (mu - lambda + 3.0), b2 = 0.5 * (mu + lambda + 3.0);
    const cplx g1 = 0.5 * (mu - lambda + 1.0), g2 = 0.5 * (mu + lambda + 1.0);
    if (is_nonpositive_integer(b1) || is_nonpositive_integer(b2) || is_nonpositive_integer(g1) ||
        is_nonpositive_integer(g2))
        throw NumericalError(ErrorKind::pole, "Lommel function parameters at a pole (lambda - mu = 2p + 1)");
    // e^{-i pi (mu+1)/2} s_{mu,lambda}(i z) = z^{mu+1} 1F2(1; b1, b2; z^2/4) / ((mu+1)^2 - lambda^2)
    const SeriesResult f = hyp1f2(b1, b2, 0.25 * z * z, tight_control());
    const cplx first = std::exp((mu + 1.0) * std::log(z)) * f.value / ((mu + 1.0) * (mu + 1.0) - lambda * lambda);
    const cplx lg = log_gamma(g1) + log_gamma(g2) + (mu - 1.0) * std::log(2.0);
    const Scaled second = Scaled::from_log(lg) * bessel_i(lambda, z);
    return first - second.value();
}

}  // namespace condasian
