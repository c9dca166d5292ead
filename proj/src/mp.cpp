#include "mp.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace condasian::mp {

long exponent(const Complex& z)
{
    long e = LONG_MIN;
    if (!mpfr_zero_p(z.re.get())) e = mpfr_get_exp(z.re.get());
    if (!mpfr_zero_p(z.im.get())) e = std::max(e, static_cast<long>(mpfr_get_exp(z.im.get())));
    return e;
}

Context::Context(mpfr_prec_t prec)
    : prec_(prec), pi_(prec), t1_(prec), t2_(prec), t3_(prec), t4_(prec),
      c1_(prec), c2_(prec), c3_(prec), c4_(prec)
{
    mpfr_const_pi(pi_.get(), MPFR_RNDN);
}

void Context::set(Complex& out, cplx v)
{
    mpfr_set_d(out.re.get(), v.real(), MPFR_RNDN);
    mpfr_set_d(out.im.get(), v.imag(), MPFR_RNDN);
}

void Context::copy(Complex& out, const Complex& a)
{
    mpfr_set(out.re.get(), a.re.get(), MPFR_RNDN);
    mpfr_set(out.im.get(), a.im.get(), MPFR_RNDN);
}

void Context::add(Complex& out, const Complex& a, const Complex& b)
{
    mpfr_add(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void Context::sub(Complex& out, const Complex& a, const Complex& b)
{
    mpfr_sub(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void Context::mul(Complex& out, const Complex& a, const Complex& b)
{
    mpfr_mul(t1_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t2_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_mul(t4_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(out.re.get(), t1_.get(), t2_.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), t3_.get(), t4_.get(), MPFR_RNDN);
}

void Context::div(Complex& out, const Complex& a, const Complex& b)
{
    // a * conj(b) / |b|^2
    mpfr_sqr(t1_.get(), b.re.get(), MPFR_RNDN);
    mpfr_sqr(t2_.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(t1_.get(), t1_.get(), t2_.get(), MPFR_RNDN);
    mpfr_mul(t2_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(t2_.get(), t2_.get(), t3_.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t4_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(t3_.get(), t3_.get(), t4_.get(), MPFR_RNDN);
    mpfr_div(out.re.get(), t2_.get(), t1_.get(), MPFR_RNDN);
    mpfr_div(out.im.get(), t3_.get(), t1_.get(), MPFR_RNDN);
}

void Context::mul_ui(Complex& out, const Complex& a, unsigned long k)
{
    mpfr_mul_ui(out.re.get(), a.re.get(), k, MPFR_RNDN);
    mpfr_mul_ui(out.im.get(), a.im.get(), k, MPFR_RNDN);
}

void Context::div_ui(Complex& out, const Complex& a, unsigned long k)
{
    mpfr_div_ui(out.re.get(), a.re.get(), k, MPFR_RNDN);
    mpfr_div_ui(out.im.get(), a.im.get(), k, MPFR_RNDN);
}

void Context::exp(Complex& out, const Complex& a)
{
    mpfr_exp(t1_.get(), a.re.get(), MPFR_RNDN);
    mpfr_sin_cos(t2_.get(), t3_.get(), a.im.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), t1_.get(), t3_.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), t1_.get(), t2_.get(), MPFR_RNDN);
}

void Context::log(Complex& out, const Complex& a)
{
    mpfr_hypot(t1_.get(), a.re.get(), a.im.get(), MPFR_RNDN);
    mpfr_atan2(t2_.get(), a.im.get(), a.re.get(), MPFR_RNDN);
    mpfr_log(out.re.get(), t1_.get(), MPFR_RNDN);
    mpfr_set(out.im.get(), t2_.get(), MPFR_RNDN);
}

void Context::sin(Complex& out, const Complex& a)
{
    // sin(x + iy) = sin x cosh y + i cos x sinh y
    mpfr_sin_cos(t1_.get(), t2_.get(), a.re.get(), MPFR_RNDN);
    mpfr_sinh_cosh(t3_.get(), t4_.get(), a.im.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), t1_.get(), t4_.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), t2_.get(), t3_.get(), MPFR_RNDN);
}

void Context::sqrt(Complex& out, const Complex& a)
{
    // sqrt|a| (cos(arg/2) + i sin(arg/2))
    mpfr_hypot(t1_.get(), a.re.get(), a.im.get(), MPFR_RNDN);
    mpfr_sqrt(t1_.get(), t1_.get(), MPFR_RNDN);
    mpfr_atan2(t2_.get(), a.im.get(), a.re.get(), MPFR_RNDN);
    mpfr_div_2ui(t2_.get(), t2_.get(), 1, MPFR_RNDN);
    mpfr_sin_cos(t3_.get(), t4_.get(), t2_.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), t1_.get(), t4_.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), t1_.get(), t3_.get(), MPFR_RNDN);
}

void Context::mul_d(Complex& out, const Complex& a, double k)
{
    mpfr_mul_d(out.re.get(), a.re.get(), k, MPFR_RNDN);
    mpfr_mul_d(out.im.get(), a.im.get(), k, MPFR_RNDN);
}

void Context::add_ui(Complex& out, const Complex& a, unsigned long k)
{
    mpfr_add_ui(out.re.get(), a.re.get(), k, MPFR_RNDN);
    mpfr_set(out.im.get(), a.im.get(), MPFR_RNDN);
}

namespace {

struct StirlingCache {
    mpfr_prec_t prec = 0;
    std::vector<std::unique_ptr<Real>> coeff;  // B_{2k} / (2k (2k-1)), k = 1..
};

thread_local StirlingCache stirling_cache;

}  // namespace

void Context::stirling_coefficient(Real& out, unsigned k)
{
    auto& cache = stirling_cache;
    if (cache.prec < prec_) {
        cache.prec = prec_;
        cache.coeff.clear();
    }
    while (cache.coeff.size() < k) {
        const unsigned kk = static_cast<unsigned>(cache.coeff.size()) + 1;
        auto c = std::make_unique<Real>(cache.prec);
        Real a(cache.prec), b(cache.prec);
        // |B_2k| = 2 (2k)! zeta(2k) / (2 pi)^(2k)
        mpfr_zeta_ui(a.get(), 2 * kk, MPFR_RNDN);
        mpfr_fac_ui(b.get(), 2 * kk, MPFR_RNDN);
        mpfr_mul(a.get(), a.get(), b.get(), MPFR_RNDN);
        mpfr_mul_2ui(a.get(), a.get(), 1, MPFR_RNDN);
        mpfr_const_pi(b.get(), MPFR_RNDN);
        mpfr_mul_2ui(b.get(), b.get(), 1, MPFR_RNDN);
        mpfr_pow_ui(b.get(), b.get(), 2 * kk, MPFR_RNDN);
        mpfr_div(a.get(), a.get(), b.get(), MPFR_RNDN);
        mpfr_div_ui(a.get(), a.get(), 2 * kk * (2 * kk - 1), MPFR_RNDN);
        if (kk % 2 == 0) mpfr_neg(a.get(), a.get(), MPFR_RNDN);
        mpfr_set(c->get(), a.get(), MPFR_RNDN);
        cache.coeff.push_back(std::move(c));
    }
    mpfr_set(out.get(), cache.coeff[k - 1]->get(), MPFR_RNDN);
}

void Context::log_gamma(Complex& out, const Complex& z_in)
{
    Complex z(prec_);  // out may alias z_in
    copy(z, z_in);
    if (mpfr_cmp_d(z.re.get(), 0.5) < 0) {
        // log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        Complex w(prec_), s(prec_);
        mpfr_ui_sub(w.re.get(), 1, z.re.get(), MPFR_RNDN);
        mpfr_neg(w.im.get(), z.im.get(), MPFR_RNDN);
        log_gamma(out, w);
        mpfr_mul(s.re.get(), z.re.get(), pi_.get(), MPFR_RNDN);
        mpfr_mul(s.im.get(), z.im.get(), pi_.get(), MPFR_RNDN);
        sin(s, s);
        log(s, s);
        add(out, out, s);
        mpfr_log(t1_.get(), pi_.get(), MPFR_RNDN);
        mpfr_sub(out.re.get(), t1_.get(), out.re.get(), MPFR_RNDN);
        mpfr_neg(out.im.get(), out.im.get(), MPFR_RNDN);
        return;
    }

    const double zmin = std::max(20.0, 0.2 * static_cast<double>(prec_));
    Complex w(prec_), prod(prec_), shift_log(prec_);
    copy(w, z);
    set(prod, cplx(1.0, 0.0));
    set(shift_log, cplx(0.0, 0.0));
    int n = 0;
    while (mpfr_cmp_d(w.re.get(), zmin) < 0) {
        mul(prod, prod, w);
        mpfr_add_ui(w.re.get(), w.re.get(), 1, MPFR_RNDN);
        if (++n % 64 == 0) {
            log(c1_, prod);
            add(shift_log, shift_log, c1_);
            set(prod, cplx(1.0, 0.0));
        }
    }
    log(c1_, prod);
    add(shift_log, shift_log, c1_);

    // (w - 1/2) log w - w + log(2 pi)/2
    Complex logw(prec_);
    log(logw, w);
    copy(c2_, w);
    mpfr_sub_d(c2_.re.get(), c2_.re.get(), 0.5, MPFR_RNDN);
    mul(out, c2_, logw);
    sub(out, out, w);
    mpfr_mul_2ui(t1_.get(), pi_.get(), 1, MPFR_RNDN);
    mpfr_log(t1_.get(), t1_.get(), MPFR_RNDN);
    mpfr_div_2ui(t1_.get(), t1_.get(), 1, MPFR_RNDN);
    mpfr_add(out.re.get(), out.re.get(), t1_.get(), MPFR_RNDN);

    // sum_k c_k / w^(2k-1)
    Complex winv(prec_), winv2(prec_), pw(prec_), term(prec_);
    set(c3_, cplx(1.0, 0.0));
    div(winv, c3_, w);
    mul(winv2, winv, winv);
    copy(pw, winv);
    Real ck(prec_);
    const long target = exponent(out) - static_cast<long>(prec_) - 4;
    for (unsigned k = 1; k < 2000; ++k) {
        stirling_coefficient(ck, k);
        mpfr_mul(term.re.get(), pw.re.get(), ck.get(), MPFR_RNDN);
        mpfr_mul(term.im.get(), pw.im.get(), ck.get(), MPFR_RNDN);
        add(out, out, term);
        if (exponent(term) < target) break;
        mul(pw, pw, winv2);
    }
    sub(out, out, shift_log);
}

Scaled Context::to_scaled(const Complex& a) const
{
    const long e = exponent(a);
    if (e == LONG_MIN) return {};
    long er = 0, ei = 0;
    double mr = mpfr_get_d_2exp(&er, a.re.get(), MPFR_RNDN);
    double mi = mpfr_get_d_2exp(&ei, a.im.get(), MPFR_RNDN);
    mr = mpfr_zero_p(a.re.get()) ? 0.0 : std::ldexp(mr, static_cast<int>(std::max(er - e, -1100L)));
    mi = mpfr_zero_p(a.im.get()) ? 0.0 : std::ldexp(mi, static_cast<int>(std::max(ei - e, -1100L)));
    return {cplx(mr, mi), static_cast<double>(e) * std::log(2.0)};
}

}  // namespace condasian::mp
