#pragma once

// Thin in-place wrappers over MPFR used by the extended-precision Bessel route.
// Every object carries its own precision, so no global MPFR state is touched.

#include <mpfr.h>

#include <climits>
#include <complex>

#include "condasian/specfun.hpp"

namespace condasian::mp {

class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    ~Real() { mpfr_clear(v_); }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

struct Complex {
    Real re, im;
    explicit Complex(mpfr_prec_t prec) : re(prec), im(prec) {}
};

// Binary exponent of max(|re|, |im|); LONG_MIN for zero.
long exponent(const Complex& z);

// Scratch registers and constants for one precision.
class Context {
public:
    explicit Context(mpfr_prec_t prec);

    mpfr_prec_t prec() const { return prec_; }
    const Real& pi() const { return pi_; }

    void set(Complex& out, cplx v);
    void copy(Complex& out, const Complex& a);
    void add(Complex& out, const Complex& a, const Complex& b);
    void sub(Complex& out, const Complex& a, const Complex& b);
    void mul(Complex& out, const Complex& a, const Complex& b);
    void div(Complex& out, const Complex& a, const Complex& b);
    void mul_ui(Complex& out, const Complex& a, unsigned long k);
    void div_ui(Complex& out, const Complex& a, unsigned long k);
    void exp(Complex& out, const Complex& a);
    void log(Complex& out, const Complex& a);
    void sin(Complex& out, const Complex& a);
    void sqrt(Complex& out, const Complex& a);  // principal branch
    void mul_d(Complex& out, const Complex& a, double k);
    void add_ui(Complex& out, const Complex& a, unsigned long k);
    void log_gamma(Complex& out, const Complex& z);

    Scaled to_scaled(const Complex& a) const;

private:
    void stirling_coefficient(Real& out, unsigned k);

    mpfr_prec_t prec_;
    Real pi_, t1_, t2_, t3_, t4_;
    Complex c1_, c2_, c3_, c4_;
};

}  // namespace condasian::mp
