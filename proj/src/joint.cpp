#include "condasian/joint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

#include "condasian/errors.hpp"
#include "mp.hpp"

namespace condasian {

namespace {

const cplx kI(0.0, 1.0);

bool is_zero(cplx z) { return z == cplx(0.0, 0.0); }

// Quantities shared by every evaluation at one transform point.
struct Setup {
    Dimensionless dim;
    SpectralConstants sc;
    double sigma, r;
    cplx s, alpha, beta;
    cplx sa;        // s + alpha
    cplx root2b;    // sqrt(2 beta) / sigma, so u(x) = 2 root2b sqrt(x)
    cplx zeta;      // 2 beta / sigma^2
    cplx b1, b2;    // 1F2 parameters

    Setup(const TransformPoint& tp, const MarketParams& p)
        : dim(derive(p)), sc(spectral(dim, p.sigma, tp.s, tp.alpha)), sigma(p.sigma), r(p.r), s(tp.s),
          alpha(tp.alpha), beta(tp.beta), sa(tp.s + tp.alpha)
    {
        root2b = std::sqrt(2.0 * beta) / sigma;
        zeta = 2.0 * beta / (sigma * sigma);
        b1 = 0.5 * (dim.mu - sc.lambda + 3.0);
        b2 = 0.5 * (dim.mu + sc.lambda + 3.0);
    }

    cplx u(double x) const { return 2.0 * root2b * std::sqrt(x); }
    double half_m1() const { return 0.5 * (1.0 + dim.mu); }
    cplx dcoef() const { return 0.5 * (sc.lambda - dim.mu - 1.0); }  // (lambda - mu - 1)/2

    cplx gamma_log() const
    {
        const cplx g1 = b1 - 1.0, g2 = b2 - 1.0;
        return std::log(2.0 / (sigma * sigma)) + log_gamma(g1) + log_gamma(g2);
    }
};

void require_positive(double x, const char* what)
{
    if (!(x > 0.0)) throw NumericalError(ErrorKind::precondition, std::string(what) + " must be > 0");
}

// Gurland ray detection: alpha = i tau z, beta = -i tau with tau > 0.
bool on_gurland_ray(const TransformPoint& tp, double& tau, double& z)
{
    if (tp.alpha.real() != 0.0 || tp.beta.real() != 0.0 || !(tp.beta.imag() < 0.0)) return false;
    if (tp.s.imag() != 0.0) return false;
    tau = -tp.beta.imag();
    z = tp.alpha.imag() / tau;
    return true;
}

// Closed form of Y in extended precision. All parameters are re-derived from the
// same double inputs at working precision so the growing parts of the two terms
// cancel exactly.
struct MpY {
    cplx value, deriv;
    double loss_digits;      // measured cancellation
    double available_digits; // precision left after the cancellation
};

MpY y_open_mp(double x, const Setup& st, mpfr_prec_t bits)
{
    mp::Context c(bits);
    auto make = [bits] { return mp::Complex(bits); };
    mp::Complex sig2 = make(), sa = make(), lam = make(), w = make(), b1 = make(), b2 = make(), e = make();
    mp::Complex t = make(), s1 = make(), s1d = make(), s2 = make(), s2d = make(), tmp = make(), tmp2 = make();
    mp::Complex lg = make(), pre = make(), t1 = make(), t1d = make(), t2 = make(), t2d = make();
    mp::Complex y = make(), yd = make();

    c.set(sig2, cplx(st.sigma, 0.0));
    c.mul(sig2, sig2, sig2);
    c.set(sa, st.sa);
    // lambda = sqrt((mu+1)^2 + 8 (s+alpha) / sigma^2)
    c.mul_ui(tmp, sa, 8);
    c.div(tmp, tmp, sig2);
    c.set(tmp2, cplx(st.dim.mu + 1.0, 0.0));
    c.mul(tmp2, tmp2, tmp2);
    c.add(tmp, tmp, tmp2);
    c.sqrt(lam, tmp);
    // w = 2 beta x / sigma^2
    c.set(w, st.beta);
    c.mul_d(w, w, 2.0 * x);
    c.div(w, w, sig2);
    c.set(tmp, cplx(st.dim.mu + 3.0, 0.0));
    c.sub(b1, tmp, lam);
    c.div_ui(b1, b1, 2);
    c.add(b2, tmp, lam);
    c.div_ui(b2, b2, 2);
    c.set(tmp, cplx(st.dim.mu + 1.0, 0.0));
    c.sub(e, lam, tmp);
    c.div_ui(e, e, 2);

    const double aw = std::abs(st.zeta * x);
    const cplx lam_d = st.sc.lambda;
    auto past_peak = [&](double k, cplx p1, cplx p2) { return std::abs((p1 + k) * (p2 + k)) > 2.0 * aw; };

    // S1 = sum w^k / ((b1)_k (b2)_k), S1d = sum k (...)
    long max1 = LONG_MIN;
    c.set(t, cplx(1.0, 0.0));
    c.set(s1, cplx(1.0, 0.0));
    c.set(s1d, cplx(0.0, 0.0));
    mp::Complex b1k = make(), b2k = make();
    c.copy(b1k, b1);
    c.copy(b2k, b2);
    const long kmax = 200000;
    for (long k = 1;; ++k) {
        if (k > kmax) throw NumericalError(ErrorKind::non_convergence, "extended-precision 1F2 series");
        c.mul(tmp, b1k, b2k);
        c.mul(t, t, w);
        c.div(t, t, tmp);
        c.add(s1, s1, t);
        c.mul_ui(tmp, t, static_cast<unsigned long>(k));
        c.add(s1d, s1d, tmp);
        c.add_ui(b1k, b1k, 1);
        c.add_ui(b2k, b2k, 1);
        const long et = mp::exponent(t);
        max1 = std::max(max1, et);
        const double kd = static_cast<double>(k);
        if (et == LONG_MIN) break;
        if (past_peak(kd, 0.5 * (st.dim.mu - lam_d + 3.0), 0.5 * (st.dim.mu + lam_d + 3.0)) &&
            et < std::max(mp::exponent(s1), mp::exponent(s1d)) - static_cast<long>(bits) - 8)
            break;
    }
    c.div(t1, s1, sa);
    c.set(tmp, cplx(x, 0.0));
    c.mul(tmp, tmp, sa);
    c.div(t1d, s1d, tmp);

    // S2 = sum w^k / (k! (lambda+1)_k), S2d = sum (e + k)(...)
    long max2 = LONG_MIN;
    mp::Complex lk = make(), ek = make();
    c.set(t, cplx(1.0, 0.0));
    c.copy(s2, t);
    c.copy(s2d, e);
    c.add_ui(lk, lam, 1);
    c.copy(ek, e);
    for (long k = 1;; ++k) {
        if (k > kmax) throw NumericalError(ErrorKind::non_convergence, "extended-precision Bessel series");
        c.mul_ui(tmp, lk, static_cast<unsigned long>(k));
        c.mul(t, t, w);
        c.div(t, t, tmp);
        c.add(s2, s2, t);
        c.add_ui(ek, ek, 1);
        c.mul(tmp, t, ek);
        c.add(s2d, s2d, tmp);
        c.add_ui(lk, lk, 1);
        const long et = mp::exponent(t);
        max2 = std::max(max2, et);
        const double kd = static_cast<double>(k);
        if (et == LONG_MIN) break;
        if (std::abs(kd * (lam_d + kd)) > 2.0 * aw &&
            et < std::max(mp::exponent(s2), mp::exponent(s2d)) - static_cast<long>(bits) - 8)
            break;
    }
    // log prefactor: log(2/sigma^2) + lgamma(g1) + lgamma(g2) - lgamma(lambda+1) + e log w
    c.set(tmp, cplx(2.0, 0.0));
    c.div(tmp, tmp, sig2);
    c.log(lg, tmp);
    c.set(tmp2, cplx(1.0, 0.0));
    c.sub(tmp, b1, tmp2);
    c.log_gamma(tmp, tmp);
    c.add(lg, lg, tmp);
    c.sub(tmp, b2, tmp2);
    c.log_gamma(tmp, tmp);
    c.add(lg, lg, tmp);
    c.add_ui(tmp, lam, 1);
    c.log_gamma(tmp, tmp);
    c.sub(lg, lg, tmp);
    c.log(tmp, w);
    c.mul(tmp, tmp, e);
    c.add(lg, lg, tmp);
    c.exp(pre, lg);
    c.mul(t2, pre, s2);
    c.mul(t2d, pre, s2d);
    c.set(tmp, cplx(x, 0.0));
    c.div(t2d, t2d, tmp);

    c.add(y, t1, t2);
    c.add(yd, t1d, t2d);

    const long ey = mp::exponent(y), eyd = mp::exponent(yd);
    const long big = std::max({mp::exponent(t1), mp::exponent(t2), max1 - mp::exponent(sa) + 1,
                               max2 + mp::exponent(pre)});
    const long bigd = std::max({mp::exponent(t1d), mp::exponent(t2d)});
    const double l2 = std::log10(2.0);
    double loss = ey == LONG_MIN ? 1e9 : static_cast<double>(big - ey) * l2;
    if (eyd != LONG_MIN) loss = std::max(loss, static_cast<double>(std::max(big, bigd) - eyd) * l2 - 1.0);
    loss = std::max(loss, 0.0);
    return {c.to_scaled(y).value(), c.to_scaled(yd).value(), loss, static_cast<double>(bits) * l2 - loss};
}

// Digits lost by the closed form in double precision above which the extended
// precision route takes over.
constexpr double kDoubleLossBudget = 3.0;

YEvaluation y_open_double(double x, const Setup& st)
{
    YEvaluation out;
    if (is_zero(st.beta)) {
        out.value = 1.0 / st.sa;
        out.deriv = 0.0;
        return out;
    }
    const cplx w = st.zeta * x;
    SeriesControl ctl = tight_control();
    ctl.max_terms = std::max(ctl.max_terms, static_cast<int>(20.0 * std::abs(w)) + 200);
    SeriesResult h, hd;
    try {
        h = hyp1f2(st.b1, st.b2, w, ctl);
        hd = hyp1f2(cplx(2.0, 0.0), st.b1 + 1.0, st.b2 + 1.0, w, ctl);
    } catch (const NumericalError& e) {
        if (e.kind() != ErrorKind::non_convergence) throw;
        // Terms beyond double range: leave it to the extended-precision route.
        out.loss_digits = std::numeric_limits<double>::infinity();
        return out;
    }
    const cplx t1 = h.value / st.sa;
    const cplx t1d = st.zeta / (st.b1 * st.b2) * hd.value / st.sa;

    const cplx u = st.u(x);
    const BesselSet bs = bessel_set(st.sc.lambda, u, BesselNeed::i_only);
    // P = (2/sigma^2) Gamma(g1) Gamma(g2) (u/2)^{-1-mu}
    const Scaled pre = Scaled::from_log(st.gamma_log() - (1.0 + st.dim.mu) * std::log(0.5 * u));
    const cplx t2 = (pre * bs.i_v).value();
    const cplx t2d = (pre * (bs.i_v * st.dcoef() + bs.i_v1 * (0.5 * u))).value() / x;

    out.value = t1 + t2;
    out.deriv = t1d + t2d;
    const double big = std::max({std::abs(t1), std::abs(t2), h.largest_term / std::abs(st.sa)});
    const double v = std::abs(out.value);
    out.loss_digits = v > 0.0 ? std::max(0.0, std::log10(big / v)) : std::numeric_limits<double>::infinity();
    const double bigd = std::max({std::abs(t1d), std::abs(t2d)});
    const double vd = std::abs(out.deriv);
    if (vd > 0.0) out.loss_digits = std::max(out.loss_digits, std::log10(bigd / vd));
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()) || !std::isfinite(out.deriv.real()) ||
        !std::isfinite(out.deriv.imag()))
        out.loss_digits = std::numeric_limits<double>::infinity();
    return out;
}

// Digits the closed form loses, from the largest term of the 1F2 series against the
// size 1/|s + alpha + beta x| of the result. Used when the terms leave double range.
double predicted_loss_digits(double x, const Setup& st)
{
    const cplx w = st.zeta * x;
    const double lw = std::log(std::abs(w));
    double lt = 0.0, peak = 0.0;
    for (long k = 0; k < 10000000; ++k) {
        const double step = lw - std::log(std::abs(st.b1 + static_cast<double>(k))) -
                            std::log(std::abs(st.b2 + static_cast<double>(k)));
        if (step < 0.0 && lt < peak) break;
        lt += step;
        peak = std::max(peak, lt);
    }
    const double result = -std::log(std::abs(st.sa + st.beta * x));
    return std::max(0.0, (peak - std::log(std::abs(st.sa)) - result) / std::log(10.0));
}

YEvaluation y_open_impl(double x, const Setup& st)
{
    YEvaluation d = y_open_double(x, st);
    if (d.loss_digits <= kDoubleLossBudget) return d;
    double digits = std::isfinite(d.loss_digits) ? d.loss_digits + 27.0 : predicted_loss_digits(x, st) + 27.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 32;
        const MpY m = y_open_mp(x, st, bits);
        if (m.available_digits >= 17.0) {
            YEvaluation out;
            out.value = m.value;
            out.deriv = m.deriv;
            // Residual loss relative to double precision; zero once resolved.
            out.loss_digits = 0.0;
            return out;
        }
        digits = std::max(digits * 1.5, m.loss_digits + 27.0);
    }
    d.loss_digits = std::numeric_limits<double>::infinity();
    return d;
}

// ---------------------------------------------------------------------------
// Asymptotic coefficients

std::vector<AsymptoticCoefficient> build_coefficients(double sigma, double r, cplx s, int order)
{
    std::vector<AsymptoticCoefficient> a(order + 1);
    const int jmax = 2 * order + 1, mmax = 3 * order + 2;
    for (auto& c : a) c.c.assign(jmax + 1, std::vector<cplx>(mmax + 1, cplx(0.0, 0.0)));
    a[0].c[0][1] = -kI;  // 1/(i (z - x))
    const double h = 0.5 * sigma * sigma;
    for (int k = 0; k < order; ++k) {
        const auto& src = a[k].c;
        auto& dst = a[k + 1].c;
        for (int j = 0; j <= jmax; ++j) {
            for (int m = 0; m <= mmax; ++m) {
                const cplx v = src[j][m];
                if (is_zero(v)) continue;
                // L = h x^2 d2 + r x d - s applied to x^j w^{-m}, then multiplied by -i w^{-1}.
                auto add = [&](int jj, int mm, cplx coef) {
                    if (is_zero(coef)) return;
                    if (jj > jmax || mm + 1 > mmax)
                        throw NumericalError(ErrorKind::precondition, "asymptotic coefficient table overflow");
                    dst[jj][mm + 1] += -kI * coef;
                };
                const double jd = j, md = m;
                add(j, m, v * (h * jd * (jd - 1.0) + r * jd) - v * s);
                add(j + 1, m + 1, v * (2.0 * h * jd * md + r * md));
                add(j + 2, m + 2, v * (h * md * (md + 1.0)));
            }
        }
    }
    return a;
}

// Coefficients depend only on (sigma, r, s); the pricing loop reuses a handful of s values.
const std::vector<AsymptoticCoefficient>& cached_coefficients(double sigma, double r, cplx s, int order)
{
    struct Entry {
        double sigma, r;
        cplx s;
        int order;
        std::vector<AsymptoticCoefficient> coef;
    };
    thread_local std::vector<Entry> cache;
    for (const auto& e : cache)
        if (e.sigma == sigma && e.r == r && e.s == s && e.order >= order) return e.coef;
    if (cache.size() >= 32) cache.erase(cache.begin());
    cache.push_back({sigma, r, s, order, build_coefficients(sigma, r, s, order)});
    return cache.back().coef;
}

void require_off_turning_point(double x, double z)
{
    if (std::abs(z - x) < 1e-3 * x)
        throw NumericalError(ErrorKind::turning_point,
                             "large-tau expansion breaks down at z = x (x=" + std::to_string(x) +
                                 ", z=" + std::to_string(z) + ")");
}

constexpr int kMaxAsymptoticOrder = 40;
constexpr double kAsymptoticLossBudget = 3.0;

}  // namespace

// The series is local in x. When the mean path x e^{rt} crosses z at t*, the phase
// tau (Y_t - z t) is stationary there and Y carries an oscillating term of size
// e^{-s t*} sqrt(2 pi / (tau |r| z)), damped as exp(-tau^2 v / 2) with v the variance
// of Y_{t*} to first order in sigma.
double y_oscillation_bound(double x, double z, double tau, cplx s, const MarketParams& p)
{
    const double r = p.r;
    if (r == 0.0 || std::log(z / x) / r <= 0.0) return 0.0;
    const double t = std::log(z / x) / r;
    const double e = z / x;  // e^{r t*}
    const double v = p.sigma * p.sigma * x * x *
                     (t * e * e - 2.0 * e * (e - 1.0) / r + (e * e - 1.0) / (2.0 * r)) / (r * r);
    const double amp = std::exp(-s.real() * t) * std::sqrt(2.0 * std::numbers::pi / (tau * std::abs(r) * z));
    const double slope = tau * x * std::abs((e - 1.0) / r);
    return amp * (1.0 + slope) * std::exp(-0.5 * tau * tau * std::max(v, 0.0));
}

namespace {

// Optimal truncation of the asymptotic series: stop before the terms grow.
YEvaluation y_asymptotic_auto(double x, double z, double tau, cplx s, const MarketParams& p)
{
    require_off_turning_point(x, z);
    const auto& coef = cached_coefficients(p.sigma, p.r, s, kMaxAsymptoticOrder);
    YEvaluation out;
    out.asymptotic = true;
    double prev = std::numeric_limits<double>::infinity();
    double tpow = 1.0 / tau;
    double last = 0.0;
    for (int k = 0; k <= kMaxAsymptoticOrder; ++k) {
        const cplx t = coef[k].eval(x, z) * tpow;
        const cplx td = coef[k].eval_deriv(x, z) * tpow;
        const double mag = std::abs(t) + std::abs(td) * x;
        if (k > 1 && mag > prev) break;
        out.value += t;
        out.deriv += td;
        last = mag;
        prev = mag;
        if (mag < 1e-17 * (std::abs(out.value) + std::abs(out.deriv) * x)) break;
        tpow /= tau;
    }
    const double scale = std::abs(out.value) + std::abs(out.deriv) * x;
    last = std::max(last, y_oscillation_bound(x, z, tau, s, p));
    out.loss_digits = scale > 0.0 ? std::max(0.0, std::log10(last / scale) + 16.0) : 0.0;
    return out;
}

Scaled f2_over_denominator(const Setup& st, double b, double x, const BesselSet& kb, const BesselSet& kx,
                           Scaled* f2_deriv_ratio)
{
    // F2(x) / [rho F2(b) - b F2'(b)] with the common factor b^{-(1+mu)/2} removed.
    const cplx ub = st.u(b), ux = st.u(x);
    const Scaled den = kb.k_v * (st.sc.rho - st.dcoef()) + kb.k_v1 * (0.5 * ub);
    const Scaled ratio_pow = Scaled::from_log(cplx(-st.half_m1() * std::log(x / b), 0.0));
    if (den.is_zero()) throw NumericalError(ErrorKind::denominator, "matching denominator vanished");
    if (f2_deriv_ratio) {
        const Scaled num = (kx.k_v * st.dcoef() - kx.k_v1 * (0.5 * ux)) * ratio_pow * cplx(1.0 / x, 0.0);
        *f2_deriv_ratio = num / den;
    }
    return kx.k_v * ratio_pow / den;
}

// Phi and optionally dPhi/dx; b <= x.
PhiWithDx phi_impl(double b, double x, const TransformPoint& tp, const MarketParams& p, bool want_dx)
{
    require_positive(b, "barrier b");
    require_positive(x, "spot x");
    if (b > x) throw NumericalError(ErrorKind::precondition, "phi requires b <= x");
    const Setup st(tp, p);
    const cplx rho = st.sc.rho;
    if (is_zero(st.beta)) {
        // Y = 1/(s+alpha) and F2 is the power x^{-(1+mu+lambda)/2}.
        const cplx e = 0.5 * (1.0 + st.dim.mu + st.sc.lambda);
        const cplx num = rho * (1.0 / st.s - 1.0 / st.sa);
        const cplx ratio = std::exp(-e * std::log(x / b)) / (rho + e);
        return {num * ratio, want_dx ? -e / x * num * ratio : cplx(0.0, 0.0)};
    }
    const YEvaluation yb = y_value(b, tp, p);
    const cplx num = rho * (1.0 / st.s - yb.value) + b * yb.deriv;
    const BesselSet kb = bessel_set(st.sc.lambda, st.u(b), BesselNeed::k_only);
    const BesselSet kx = x == b ? kb : bessel_set(st.sc.lambda, st.u(x), BesselNeed::k_only);
    Scaled dratio;
    const Scaled ratio = f2_over_denominator(st, b, x, kb, kx, want_dx ? &dratio : nullptr);
    PhiWithDx out;
    out.value = (ratio * num).value();
    if (want_dx) out.dx = (dratio * num).value();
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

OdeSolutionPair fundamental_pair(double x, const TransformPoint& tp, const MarketParams& params)
{
    require_positive(x, "x");
    const Setup st(tp, params);
    if (is_zero(st.beta)) throw NumericalError(ErrorKind::zero_argument, "fundamental pair needs beta != 0");
    const cplx u = st.u(x);
    const BesselSet bs = bessel_set(st.sc.lambda, u, BesselNeed::both);
    const Scaled pw = Scaled::from_log(cplx(-st.half_m1() * std::log(x), 0.0));
    const Scaled pwx = pw * cplx(1.0 / x, 0.0);
    OdeSolutionPair out;
    out.f1 = (pw * bs.i_v).value();
    out.f2 = (pw * bs.k_v).value();
    out.f1_deriv = (pwx * (bs.i_v * st.dcoef() + bs.i_v1 * (0.5 * u))).value();
    out.f2_deriv = (pwx * (bs.k_v * st.dcoef() - bs.k_v1 * (0.5 * u))).value();
    return out;
}

YEvaluation y_open_eval(double x, const TransformPoint& tp, const MarketParams& params)
{
    require_positive(x, "x");
    return y_open_impl(x, Setup(tp, params));
}

namespace {

YEvaluation y_open_checked(double x, const TransformPoint& tp, const MarketParams& params)
{
    const YEvaluation y = y_open_eval(x, tp, params);
    if (y.loss_digits > kMaxLossDigits)
        throw NumericalError(ErrorKind::cancellation, "closed form of Y lost " + std::to_string(y.loss_digits) +
                                                          " digits at x=" + std::to_string(x));
    return y;
}

}  // namespace

cplx y_open(double x, const TransformPoint& tp, const MarketParams& params)
{
    return y_open_checked(x, tp, params).value;
}

cplx y_open_deriv(double x, const TransformPoint& tp, const MarketParams& params)
{
    return y_open_checked(x, tp, params).deriv;
}

cplx AsymptoticCoefficient::eval(double x, double z) const
{
    const double w = 1.0 / (z - x);
    cplx sum(0.0, 0.0);
    double xj = 1.0;
    for (const auto& row : c) {
        double wm = 1.0;
        cplx acc(0.0, 0.0);
        for (const cplx& v : row) {
            acc += v * wm;
            wm *= w;
        }
        sum += acc * xj;
        xj *= x;
    }
    return sum;
}

cplx AsymptoticCoefficient::eval_deriv(double x, double z) const
{
    // d/dx x^j w^{-m} = j x^{j-1} w^{-m} + m x^j w^{-m-1}
    const double w = 1.0 / (z - x);
    cplx sum(0.0, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double xj = std::pow(x, static_cast<double>(j));
        const double xj1 = j > 0 ? std::pow(x, static_cast<double>(j) - 1.0) : 0.0;
        double wm = 1.0;
        for (std::size_t m = 0; m < c[j].size(); ++m) {
            if (!is_zero(c[j][m])) sum += c[j][m] * (static_cast<double>(j) * xj1 * wm + static_cast<double>(m) * xj * wm * w);
            wm *= w;
        }
    }
    return sum;
}

cplx AsymptoticCoefficient::eval_deriv2(double x, double z) const
{
    const double w = 1.0 / (z - x);
    cplx sum(0.0, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double jd = static_cast<double>(j);
        double wm = 1.0;
        for (std::size_t m = 0; m < c[j].size(); ++m) {
            if (!is_zero(c[j][m])) {
                const double md = static_cast<double>(m);
                const double a = j >= 2 ? jd * (jd - 1.0) * std::pow(x, jd - 2.0) * wm : 0.0;
                const double b = j >= 1 ? 2.0 * jd * md * std::pow(x, jd - 1.0) * wm * w : 0.0;
                const double cc = md * (md + 1.0) * std::pow(x, jd) * wm * w * w;
                sum += c[j][m] * (a + b + cc);
            }
            wm *= w;
        }
    }
    return sum;
}

std::vector<AsymptoticCoefficient> y_asymptotic_coefficients(double sigma, double r, cplx s, int order)
{
    if (order < 0) throw NumericalError(ErrorKind::precondition, "asymptotic order must be >= 0");
    return build_coefficients(sigma, r, s, order);
}

cplx y_asymptotic(double x, double z, double tau, cplx s, const MarketParams& params, int order)
{
    require_off_turning_point(x, z);
    const auto& coef = cached_coefficients(params.sigma, params.r, s, std::max(order, 1));
    cplx sum(0.0, 0.0);
    double tp = 1.0 / tau;
    for (int k = 0; k <= order; ++k) {
        sum += coef[k].eval(x, z) * tp;
        tp /= tau;
    }
    return sum;
}

cplx y_asymptotic_deriv(double x, double z, double tau, cplx s, const MarketParams& params, int order)
{
    require_off_turning_point(x, z);
    const auto& coef = cached_coefficients(params.sigma, params.r, s, std::max(order, 1));
    cplx sum(0.0, 0.0);
    double tp = 1.0 / tau;
    for (int k = 0; k <= order; ++k) {
        sum += coef[k].eval_deriv(x, z) * tp;
        tp /= tau;
    }
    return sum;
}

YEvaluation y_value(double x, const TransformPoint& tp, const MarketParams& params)
{
    require_positive(x, "x");
    const Setup st(tp, params);
    double tau = 0.0, z = 0.0;
    const bool ray = on_gurland_ray(tp, tau, z) && std::abs(z - x) >= 1e-3 * x;
    const bool far = std::abs(st.zeta * x) > 40.0 * std::max(1.0, std::abs(st.sc.lambda));
    if (ray && far) {
        // The expansion is only used where its smallest term certifies double accuracy;
        // near the turning point it is not, and the closed form takes over.
        const YEvaluation asym = y_asymptotic_auto(x, z, tau, tp.s, params);
        if (asym.loss_digits <= kAsymptoticLossBudget) return asym;
    }
    const YEvaluation open = y_open_impl(x, st);
    if (open.loss_digits <= kMaxLossDigits) return open;
    if (ray) {
        const YEvaluation asym = y_asymptotic_auto(x, z, tau, tp.s, params);
        if (asym.loss_digits < open.loss_digits) return asym;
    }
    throw NumericalError(ErrorKind::cancellation,
                         "Y lost " + std::to_string(open.loss_digits) + " digits at x=" + std::to_string(x));
}

cplx phi(double b, double x, const TransformPoint& tp, const MarketParams& params)
{
    return phi_impl(b, x, tp, params, false).value;
}

PhiWithDx phi_with_dx(double b, double x, const TransformPoint& tp, const MarketParams& params)
{
    return phi_impl(b, x, tp, params, true);
}

cplx f_full(double b, double x, const TransformPoint& tp, const MarketParams& params)
{
    require_positive(x, "x");
    if (b < 0.0) throw NumericalError(ErrorKind::precondition, "barrier b must be >= 0");
    if (b == 0.0) return y_value(x, tp, params).value;
    if (x >= b) return phi(b, x, tp, params) + y_value(x, tp, params).value;
    const Setup st(tp, params);
    const cplx at_b = phi(b, b, tp, params) + y_value(b, tp, params).value;
    // B x^rho = (F(b) - 1/s) (x/b)^rho
    return (at_b - 1.0 / st.s) * std::exp(st.sc.rho * std::log(x / b)) + 1.0 / st.s;
}

double TailEstimate::envelope(double tau) const
{
    return std::abs(amplitude) * std::pow(tau, power) * std::exp(-decay_a.real() * std::sqrt(tau));
}

TailEstimate phi_tail(double b, double x, double z, cplx s, const MarketParams& params)
{
    require_positive(b, "barrier b");
    if (!(b < x)) throw NumericalError(ErrorKind::precondition, "tail estimate requires b < x");
    if (!(z > b)) throw NumericalError(ErrorKind::precondition, "tail estimate requires z > b");
    const Dimensionless dim = derive(params);
    const SpectralConstants sc = spectral(dim, params.sigma, s, 0.0);
    auto xi = [](cplx y, cplx& w) {
        w = std::sqrt(1.0 + y * y);
        if (w.imag() > 0.0 || (w.imag() == 0.0 && (1.0 + y * y).real() < 0.0)) w = -w;
        return w + std::log(y / (1.0 + w));
    };
    const cplx y1 = -kI * std::sqrt(x / z), y2 = -kI * std::sqrt(b / z);
    cplx w1, w2;
    const cplx xi1 = xi(y1, w1), xi2 = xi(y2, w2);
    if (std::abs(w1) < 1e-8) throw NumericalError(ErrorKind::excluded_point, "tail estimate at z = x");
    TailEstimate t;
    t.decay_a = 2.0 / params.sigma * std::sqrt(2.0 * kI * z) * (xi1 - xi2);
    t.amplitude = sc.rho / s * std::exp(-0.5 * (1.0 + dim.mu) * std::log(x / b)) * params.sigma /
                  std::sqrt(-2.0 * kI * b) * y2 / (std::sqrt(w1) * std::sqrt(w2));
    if (!(t.decay_a.real() > 0.0))
        throw NumericalError(ErrorKind::truncation, "tail envelope does not decay (Re a <= 0)");
    return t;
}

cplx y0_limit(double x, cplx s, cplx alpha, cplx beta, double r)
{
    require_positive(x, "x");
    if (is_zero(beta)) return 1.0 / (s + alpha);
    if (r == 0.0) throw NumericalError(ErrorKind::precondition, "sigma -> 0 limit requires r != 0");
    const cplx gamma = -(s + alpha) / r;
    return kummer_m(1.0, gamma + 1.0, beta * x / r, tight_control()) / (s + alpha);
}

cplx phi0_limit(double b, double x, cplx s, cplx alpha, cplx beta, double r)
{
    require_positive(b, "barrier b");
    require_positive(x, "x");
    if (!(r < 0.0)) throw NumericalError(ErrorKind::precondition, "sigma -> 0 limit of Phi requires r < 0");
    const cplx gamma = -(s + alpha) / r;
    const cplx m = kummer_m(1.0, gamma + 1.0, beta * b / r, tight_control());
    return std::exp(beta / r * (x - b) + gamma * std::log(b / x)) * (1.0 / s - m / (s + alpha));
}

}  // namespace condasian
