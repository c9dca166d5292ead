#pragma once

#include <complex>

namespace condasian {

using cplx = std::complex<double>;

struct SeriesControl {
    int max_terms = 400;
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;

    void validate() const;
};

// Tolerances used inside the pricing pipeline.
SeriesControl tight_control();

struct SeriesResult {
    cplx value;
    int terms = 0;
    double largest_term = 0.0;

    // log10(largest term / |value|), the number of digits lost to cancellation.
    double loss_digits() const;
};

// A complex number stored as mant * exp(log_scale), for values that over- or underflow.
struct Scaled {
    cplx mant{0.0, 0.0};
    double log_scale = 0.0;

    static Scaled from_log(cplx log_value);
    static Scaled from(cplx value) { return {value, 0.0}; }
    cplx value() const;
    cplx log() const;
    double log_abs() const;
    bool is_zero() const { return mant == cplx(0.0, 0.0); }
};

Scaled operator*(const Scaled& a, const Scaled& b);
Scaled operator/(const Scaled& a, const Scaled& b);
Scaled operator*(const Scaled& a, cplx b);
Scaled operator+(const Scaled& a, const Scaled& b);
Scaled operator-(const Scaled& a, const Scaled& b);

// log Gamma(z), continued analytically from the positive real axis
// (the branch obtained by summing logs along the recurrence).
cplx log_gamma(cplx z);

// log sin(pi z), stable for large |Im z|. Defined modulo 2 pi i.
cplx log_sin_pi(cplx z);

cplx bessel_i(cplx order, cplx arg, const SeriesControl& ctl = {});
cplx bessel_k(cplx order, cplx arg, const SeriesControl& ctl = {});

// Leading uniform (Debye) term of K_order(order * y). On the cut of sqrt(1 + y^2)
// the root with negative imaginary part is taken.
cplx bessel_k_uniform(cplx order, cplx y);
cplx bessel_k_uniform_log(cplx order, cplx y);

// I_v, I_{v+1}, K_v, K_{v+1} at one argument, log-scaled. Re(order) >= 0.
struct BesselSet {
    Scaled i_v, i_v1, k_v, k_v1;
    int precision_bits = 53;   // 53 means plain double arithmetic was sufficient
    double loss_digits = 0.0;  // cancellation measured in the accepted evaluation
};

enum class BesselNeed { i_only, k_only, both };

BesselSet bessel_set(cplx order, cplx arg, BesselNeed need = BesselNeed::both);

// 1F2(1; b1, b2; z)
SeriesResult hyp1f2(cplx b1, cplx b2, cplx z, const SeriesControl& ctl = {});
// 1F2(a; b1, b2; z)
SeriesResult hyp1f2(cplx a, cplx b1, cplx b2, cplx z, const SeriesControl& ctl);

cplx kummer_m(cplx a, cplx b, cplx z, const SeriesControl& ctl = {});
Scaled kummer_m_scaled(cplx a, cplx b, cplx z, const SeriesControl& ctl = {});

cplx whittaker_m(cplx kappa, cplx eta, cplx z);
Scaled whittaker_m_scaled(cplx kappa, cplx eta, cplx z, const SeriesControl& ctl = {});

// Modified Lommel function T_{mu,lambda}(z).
cplx lommel_t(double mu, cplx lambda, cplx z);

namespace detail {

// Connection-formula and large-argument routes, exposed for cross-checks.
BesselSet bessel_set_series(cplx order, cplx arg, BesselNeed need);
bool bessel_set_large_arg(cplx order, cplx arg, BesselSet& out);

}  // namespace detail

}  // namespace condasian
