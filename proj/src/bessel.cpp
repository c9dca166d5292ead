// Modified Bessel functions I and K of complex order and argument.
//
// Moderate arguments use the ascending series for I_{+v} and I_{-v} together
// with the connection formula for K. The series is summed in double precision
// when the predicted cancellation is small, otherwise in MPFR at a precision
// chosen from the predicted loss and then verified against the measured loss.
// Large arguments with small order use the Hankel expansions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "condasian/errors.hpp"
#include "condasian/specfun.hpp"
#include "mp.hpp"

namespace condasian {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn10 = 2.30258509299404568402;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kDoubleLossBudget = 2.5;  // digits
constexpr double kLargeArg = 30.0;

double log10_from_ln(double v) { return v / kLn10; }

// Predicted largest term (natural log) of sum_k zeta^k / (k! (1+v)_k).
double envelope_log_max(cplx v, cplx zeta)
{
    const double lz = std::log(std::abs(zeta));
    double acc = 0.0, best = 0.0;
    const int kmax = 20000;
    for (int k = 1; k < kmax; ++k) {
        acc += lz - std::log(static_cast<double>(k)) - std::log(std::abs(v + static_cast<double>(k)));
        best = std::max(best, acc);
        if (acc < best - 50.0 && static_cast<double>(k) > std::abs(v)) break;
    }
    return best;
}

cplx uniform_xi(cplx y, cplx& root)
{
    const cplx w2 = 1.0 + y * y;
    cplx w = std::sqrt(w2);
    if (w2.real() < 0.0 && std::abs(w2.imag()) <= 1e-14 * std::abs(w2)) w = cplx(0.0, -std::sqrt(-w2.real()));
    root = w;
    return w + std::log(y / (1.0 + w));
}

// Estimated log|K_v(u)| and log|I_v(u)|, used only to choose a working precision.
void estimate_logs(cplx v, cplx u, double& log_k, double& log_i)
{
    if (v.real() < 0.0) v = -v;
    if (std::abs(v) >= 3.0) {
        cplx root;
        const cplx y = u / v;
        const cplx xi = uniform_xi(y, root);
        const cplx quart = 0.25 * std::log(root * root + 1e-300);
        log_k = (0.5 * std::log(kPi / (2.0 * v)) - v * xi - quart).real();
        log_i = (v * xi - 0.5 * std::log(2.0 * kPi * v) - quart).real();
    } else {
        log_k = (0.5 * std::log(kPi / (2.0 * u)) - u).real();
        log_i = (std::abs(u.real()) - 0.5 * std::log(2.0 * kPi * u)).real();
    }
}

struct Logs {
    cplx log_half_u, lg_v, log_sin;
    cplx log_a;       // log[(u/2)^v / Gamma(1+v)]
    cplx log_cminus;  // log[Gamma(v)/2 (u/2)^{-v}]
    cplx log_cplus;   // log[pi (u/2)^v / (2 sin(pi v) Gamma(1+v))]
};

Logs prefactor_logs(cplx v, cplx u, bool need_k)
{
    Logs L;
    L.log_half_u = std::log(0.5 * u);
    const cplx lg1 = log_gamma(1.0 + v);
    L.log_a = v * L.log_half_u - lg1;
    if (need_k) {
        L.lg_v = lg1 - std::log(v);
        L.log_sin = log_sin_pi(v);
        L.log_cminus = L.lg_v - v * L.log_half_u - kLn2;
        L.log_cplus = L.log_a + std::log(kPi / 2.0) - L.log_sin;
    }
    return L;
}

bool near_integer(cplx v)
{
    return std::abs(v.imag()) < 1e-6 && std::abs(v.real() - std::round(v.real())) < 1e-6;
}

// Ascending sums in double. Returns false on overflow or non-convergence.
struct DoubleSums {
    cplx s, p;              // sum t_k, sum k t_k (order +v) or sum (v-k) t_k (order -v)
    double max_s = 0.0, max_p = 0.0;
};

bool double_sums(cplx order, cplx zeta, bool minus, cplx v, DoubleSums& out)
{
    cplx t(1.0, 0.0);
    out.s = t;
    out.p = minus ? v : cplx(0.0, 0.0);
    out.max_s = 1.0;
    out.max_p = std::abs(out.p);
    const int kmax = 20000;
    for (int k = 1; k < kmax; ++k) {
        const double dk = static_cast<double>(k);
        t *= zeta / (dk * (order + dk));
        const cplx q = minus ? (v - dk) * t : dk * t;
        out.s += t;
        out.p += q;
        const double at = std::abs(t), aq = std::abs(q);
        if (!std::isfinite(at) || at > 1e250) return false;
        out.max_s = std::max(out.max_s, at);
        out.max_p = std::max(out.max_p, aq);
        if (dk > std::abs(order) && std::max(at, aq) < 1e-18 * std::max(out.max_s, out.max_p)) return true;
    }
    return false;
}

struct Evaluated {
    BesselSet set;
    double loss = 0.0;  // digits
};

Evaluated evaluate_double(cplx v, cplx u, BesselNeed need, bool& ok)
{
    ok = false;
    Evaluated ev;
    const bool need_k = need != BesselNeed::i_only;
    const bool need_i = need != BesselNeed::k_only;
    const cplx zeta = 0.25 * u * u;
    DoubleSums plus, minus;
    if (!double_sums(v, zeta, false, v, plus)) return ev;
    if (need_k && !double_sums(-v, zeta, true, v, minus)) return ev;
    const Logs L = prefactor_logs(v, u, need_k);
    const Scaled two_over_u = Scaled::from(2.0 / u);

    double loss = 0.0;
    if (need_i) {
        const Scaled a = Scaled::from_log(L.log_a);
        ev.set.i_v = a * plus.s;
        ev.set.i_v1 = a * two_over_u * plus.p;
        loss = std::max(loss, std::log10(plus.max_s / std::abs(plus.s)));
        loss = std::max(loss, std::log10(plus.max_p / std::abs(plus.p)));
    }
    if (need_k) {
        const Scaled cm = Scaled::from_log(L.log_cminus);
        const Scaled cp = Scaled::from_log(L.log_cplus);
        ev.set.k_v = cm * minus.s - cp * plus.s;
        ev.set.k_v1 = two_over_u * (cm * minus.p + cp * plus.p);
        const double big_k = std::max(cm.log_abs() + std::log(minus.max_s), cp.log_abs() + std::log(plus.max_s));
        const double big_k1 = std::max(cm.log_abs() + std::log(minus.max_p), cp.log_abs() + std::log(plus.max_p)) +
                              std::log(std::abs(2.0 / u));
        loss = std::max(loss, log10_from_ln(big_k - ev.set.k_v.log_abs()));
        loss = std::max(loss, log10_from_ln(big_k1 - ev.set.k_v1.log_abs()));
    }
    if (!std::isfinite(loss)) return ev;
    ev.loss = loss;
    ev.set.loss_digits = loss;
    ev.set.precision_bits = 53;
    ok = true;
    return ev;
}

Evaluated evaluate_mp(cplx vd, cplx ud, BesselNeed need, mpfr_prec_t bits)
{
    using mp::Complex;
    mp::Context ctx(bits);
    const bool need_k = need != BesselNeed::i_only;
    const bool need_i = need != BesselNeed::k_only;

    Complex v(bits), u(bits), zeta(bits), t(bits), q(bits), den(bits);
    Complex s_plus(bits), p_plus(bits), s_minus(bits), q_minus(bits);
    ctx.set(v, vd);
    ctx.set(u, ud);
    ctx.mul(zeta, u, u);
    mpfr_div_2ui(zeta.re.get(), zeta.re.get(), 2, MPFR_RNDN);
    mpfr_div_2ui(zeta.im.get(), zeta.im.get(), 2, MPFR_RNDN);

    const double vabs = std::abs(vd);
    const auto run = [&](bool minus, Complex& s, Complex& p, long& max_s, long& max_p) {
        ctx.set(t, cplx(1.0, 0.0));
        ctx.copy(s, t);
        if (minus) ctx.copy(p, v); else ctx.set(p, cplx(0.0, 0.0));
        max_s = 1;
        max_p = mp::exponent(p);
        const int kmax = 20000;
        for (int k = 1; k < kmax; ++k) {
            ctx.mul(t, t, zeta);
            ctx.copy(den, v);
            if (minus) {
                mpfr_neg(den.re.get(), den.re.get(), MPFR_RNDN);
                mpfr_neg(den.im.get(), den.im.get(), MPFR_RNDN);
            }
            mpfr_add_ui(den.re.get(), den.re.get(), static_cast<unsigned long>(k), MPFR_RNDN);
            ctx.div(t, t, den);
            ctx.div_ui(t, t, static_cast<unsigned long>(k));
            if (minus) {
                ctx.copy(q, v);
                mpfr_sub_ui(q.re.get(), q.re.get(), static_cast<unsigned long>(k), MPFR_RNDN);
                ctx.mul(q, q, t);
            } else {
                ctx.mul_ui(q, t, static_cast<unsigned long>(k));
            }
            ctx.add(s, s, t);
            ctx.add(p, p, q);
            const long et = mp::exponent(t), eq = mp::exponent(q);
            max_s = std::max(max_s, et);
            max_p = std::max(max_p, eq);
            if (static_cast<double>(k) > vabs && std::max(et, eq) < std::max(max_s, max_p) - static_cast<long>(bits) - 8)
                return true;
        }
        return false;
    };

    long ms_plus = 0, mp_plus = 0, ms_minus = 0, mq_minus = 0;
    if (!run(false, s_plus, p_plus, ms_plus, mp_plus))
        throw NumericalError(ErrorKind::non_convergence, "Bessel series (extended precision) did not converge");
    if (need_k && !run(true, s_minus, q_minus, ms_minus, mq_minus))
        throw NumericalError(ErrorKind::non_convergence, "Bessel series (extended precision) did not converge");

    // Prefactors.
    Complex log_half_u(bits), lg(bits), la(bits), w(bits), tmp(bits), a(bits), two_over_u(bits);
    ctx.copy(w, u);
    mpfr_div_2ui(w.re.get(), w.re.get(), 1, MPFR_RNDN);
    mpfr_div_2ui(w.im.get(), w.im.get(), 1, MPFR_RNDN);
    ctx.log(log_half_u, w);
    ctx.log_gamma(lg, v);  // log Gamma(v)
    ctx.mul(la, v, log_half_u);
    ctx.log(tmp, v);
    ctx.sub(la, la, lg);
    ctx.sub(la, la, tmp);  // v log(u/2) - log Gamma(1+v)
    ctx.exp(a, la);
    ctx.set(tmp, cplx(2.0, 0.0));
    ctx.div(two_over_u, tmp, u);

    Evaluated ev;
    long loss_bits = 0;
    if (need_i) {
        Complex iv(bits), iv1(bits);
        ctx.mul(iv, a, s_plus);
        ctx.mul(iv1, a, p_plus);
        ctx.mul(iv1, iv1, two_over_u);
        ev.set.i_v = ctx.to_scaled(iv);
        ev.set.i_v1 = ctx.to_scaled(iv1);
        loss_bits = std::max(loss_bits, ms_plus - mp::exponent(s_plus));
        loss_bits = std::max(loss_bits, mp_plus - mp::exponent(p_plus));
    }
    if (need_k) {
        Complex cm(bits), cp(bits), sinv(bits), kv(bits), kv1(bits), x1(bits), x2(bits);
        // C- = Gamma(v)/2 (u/2)^{-v}
        ctx.mul(tmp, v, log_half_u);
        ctx.sub(tmp, lg, tmp);
        ctx.exp(cm, tmp);
        mpfr_div_2ui(cm.re.get(), cm.re.get(), 1, MPFR_RNDN);
        mpfr_div_2ui(cm.im.get(), cm.im.get(), 1, MPFR_RNDN);
        // C+ = pi A / (2 sin(pi v))
        mpfr_mul(tmp.re.get(), v.re.get(), ctx.pi().get(), MPFR_RNDN);
        mpfr_mul(tmp.im.get(), v.im.get(), ctx.pi().get(), MPFR_RNDN);
        ctx.sin(sinv, tmp);
        mpfr_mul_2ui(sinv.re.get(), sinv.re.get(), 1, MPFR_RNDN);
        mpfr_mul_2ui(sinv.im.get(), sinv.im.get(), 1, MPFR_RNDN);
        ctx.div(cp, a, sinv);
        mpfr_mul(cp.re.get(), cp.re.get(), ctx.pi().get(), MPFR_RNDN);
        mpfr_mul(cp.im.get(), cp.im.get(), ctx.pi().get(), MPFR_RNDN);

        ctx.mul(x1, cm, s_minus);
        ctx.mul(x2, cp, s_plus);
        ctx.sub(kv, x1, x2);
        const long big_k = std::max(mp::exponent(cm) + ms_minus, mp::exponent(cp) + ms_plus);
        ctx.mul(x1, cm, q_minus);
        ctx.mul(x2, cp, p_plus);
        ctx.add(kv1, x1, x2);
        const long big_k1 = std::max(mp::exponent(cm) + mq_minus, mp::exponent(cp) + mp_plus);
        const long e_kv1 = mp::exponent(kv1);
        ctx.mul(kv1, kv1, two_over_u);
        ev.set.k_v = ctx.to_scaled(kv);
        ev.set.k_v1 = ctx.to_scaled(kv1);
        loss_bits = std::max(loss_bits, big_k - mp::exponent(kv));
        loss_bits = std::max(loss_bits, big_k1 - e_kv1);
    }
    ev.loss = static_cast<double>(loss_bits) * std::log10(2.0);
    ev.set.loss_digits = ev.loss;
    ev.set.precision_bits = static_cast<int>(bits);
    return ev;
}

double predicted_loss(cplx v, cplx u, BesselNeed need)
{
    const bool need_k = need != BesselNeed::i_only;
    const cplx zeta = 0.25 * u * u;
    const double env_plus = envelope_log_max(v, zeta);
    double log_k = 0.0, log_i = 0.0;
    estimate_logs(v, u, log_k, log_i);
    const Logs L = prefactor_logs(v, u, need_k);
    double loss = 0.0;
    if (need != BesselNeed::k_only) loss = std::max(loss, env_plus - (log_i - L.log_a.real()));
    if (need_k) {
        const double env_minus = envelope_log_max(-v, zeta);
        const double big = std::max(L.log_cminus.real() + env_minus, L.log_cplus.real() + env_plus);
        loss = std::max(loss, big - log_k);
    }
    return std::max(0.0, log10_from_ln(loss));
}

BesselSet average(const BesselSet& a, const BesselSet& b)
{
    const Scaled half = Scaled::from(cplx(0.5, 0.0));
    BesselSet r;
    r.i_v = (a.i_v + b.i_v) * half;
    r.i_v1 = (a.i_v1 + b.i_v1) * half;
    r.k_v = (a.k_v + b.k_v) * half;
    r.k_v1 = (a.k_v1 + b.k_v1) * half;
    r.precision_bits = std::max(a.precision_bits, b.precision_bits);
    r.loss_digits = std::max(a.loss_digits, b.loss_digits);
    return r;
}

// Sum_k a_k(v) (sign/u)^k, a_k(v) = prod_{j<=k} (4v^2 - (2j-1)^2) / (k! 8^k).
bool hankel_sum(cplx v, cplx u, double sign, cplx& sum)
{
    const cplx mu4 = 4.0 * v * v;
    cplx term(1.0, 0.0);
    sum = term;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu4 - odd * odd) / (static_cast<double>(k) * 8.0 * u) * sign;
        const double at = std::abs(term);
        if (at > prev && k > 2) return false;
        sum += term;
        if (at < 1e-17 * std::abs(sum)) return true;
        prev = at;
    }
    return false;
}

}  // namespace

cplx log_sin_pi(cplx z)
{
    const cplx ipz = cplx(0.0, kPi) * z;
    if (std::abs(z.imag()) < 20.0) return std::log(std::sin(kPi * z));
    if (z.imag() > 0.0) return -ipz + std::log(cplx(0.0, 0.5)) + std::log(1.0 - std::exp(2.0 * ipz));
    return ipz + std::log(cplx(0.0, -0.5)) + std::log(1.0 - std::exp(-2.0 * ipz));
}

cplx bessel_k_uniform_log(cplx order, cplx y)
{
    if (y == cplx(0.0, 0.0) || std::abs(1.0 + y * y) < 1e-12)
        throw NumericalError(ErrorKind::excluded_point, "uniform Bessel expansion at y in {0, +i, -i}");
    cplx root;
    const cplx xi = uniform_xi(y, root);
    return 0.5 * std::log(kPi / (2.0 * order)) - order * xi - 0.5 * std::log(root);
}

cplx bessel_k_uniform(cplx order, cplx y) { return std::exp(bessel_k_uniform_log(order, y)); }

namespace detail {

bool bessel_set_large_arg(cplx v, cplx u, BesselSet& out)
{
    if (std::abs(u) < kLargeArg || u.real() <= 0.0) return false;
    cplx k0, k1, i0a, i0b, i1a, i1b;
    if (!hankel_sum(v, u, 1.0, k0) || !hankel_sum(v + 1.0, u, 1.0, k1)) return false;
    if (!hankel_sum(v, u, -1.0, i0a) || !hankel_sum(v + 1.0, u, -1.0, i1a)) return false;
    i0b = k0;
    i1b = k1;
    const cplx lk = 0.5 * std::log(kPi / (2.0 * u)) - u;
    out.k_v = Scaled::from_log(lk) * k0;
    out.k_v1 = Scaled::from_log(lk) * k1;
    // I_v(u) ~ e^u/sqrt(2 pi u) sum (-1)^k a_k/u^k + i e^{+-i pi v} e^{-u}/sqrt(2 pi u) sum a_k/u^k
    const double sgn = u.imag() >= 0.0 ? 1.0 : -1.0;
    const cplx li = u - 0.5 * std::log(2.0 * kPi * u);
    const cplx lsmall = -u - 0.5 * std::log(2.0 * kPi * u) + cplx(0.0, sgn * kPi) * v;
    const cplx lsmall1 = -u - 0.5 * std::log(2.0 * kPi * u) + cplx(0.0, sgn * kPi) * (v + 1.0);
    out.i_v = Scaled::from_log(li) * i0a + Scaled::from_log(lsmall) * (cplx(0.0, 1.0) * i0b);
    out.i_v1 = Scaled::from_log(li) * i1a + Scaled::from_log(lsmall1) * (cplx(0.0, 1.0) * i1b);
    out.precision_bits = 53;
    out.loss_digits = 0.0;
    return true;
}

BesselSet bessel_set_series(cplx v, cplx u, BesselNeed need)
{
    const double pred = predicted_loss(v, u, need);
    if (pred <= kDoubleLossBudget) {
        bool ok = false;
        Evaluated ev = evaluate_double(v, u, need, ok);
        if (ok && ev.loss <= kDoubleLossBudget) return ev.set;
    }
    double digits = 17.0 + pred + 10.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 32;
        Evaluated ev = evaluate_mp(v, u, need, bits);
        const double available = static_cast<double>(bits) * std::log10(2.0) - ev.loss;
        if (available >= 17.0) return ev.set;
        digits = std::max(digits * 1.5, 17.0 + ev.loss + 10.0);
    }
    throw NumericalError(ErrorKind::cancellation, "Bessel connection formula lost all digits");
}

}  // namespace detail

BesselSet bessel_set(cplx order, cplx arg, BesselNeed need)
{
    if (arg == cplx(0.0, 0.0)) throw NumericalError(ErrorKind::zero_argument, "Bessel function at argument 0");
    if (!std::isfinite(order.real()) || !std::isfinite(order.imag()) || !std::isfinite(arg.real()) ||
        !std::isfinite(arg.imag()))
        throw NumericalError(ErrorKind::precondition, "non-finite Bessel order or argument");
    BesselSet out;
    if (detail::bessel_set_large_arg(order, arg, out)) return out;
    if (need != BesselNeed::i_only && near_integer(order)) {
        const double eps = 1e-5;
        return average(detail::bessel_set_series(order + eps, arg, need),
                       detail::bessel_set_series(order - eps, arg, need));
    }
    return detail::bessel_set_series(order, arg, need);
}

cplx bessel_i(cplx order, cplx arg, const SeriesControl& ctl)
{
    ctl.validate();
    if (arg == cplx(0.0, 0.0)) return order == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    if (order.real() < 0.0) {
        if (near_integer(order) && std::abs(order.real() - std::round(order.real())) == 0.0 && order.imag() == 0.0)
            order = -order;
        else {
            // Plain series; Gamma(1+v) is handled by reflection.
            const cplx zeta = 0.25 * arg * arg;
            cplx t(1.0, 0.0), s = t;
            int k = 1;
            const int kmax = std::max(ctl.max_terms, static_cast<int>(10.0 * std::abs(arg)) + 100);
            for (; k < kmax; ++k) {
                t *= zeta / (static_cast<double>(k) * (order + static_cast<double>(k)));
                s += t;
                if (static_cast<double>(k) > std::abs(order) && std::abs(t) < 1e-17 * std::abs(s)) break;
            }
            if (k >= kmax)
                throw NumericalError(ErrorKind::non_convergence,
                                     "Bessel I series: " + std::to_string(k) + " terms, last increment " +
                                         std::to_string(std::abs(t)));
            const cplx la = order * std::log(0.5 * arg) - log_gamma(1.0 + order);
            return std::exp(la) * s;
        }
    }
    return bessel_set(order, arg, BesselNeed::i_only).i_v.value();
}

cplx bessel_k(cplx order, cplx arg, const SeriesControl& ctl)
{
    ctl.validate();
    if (order.real() < 0.0) order = -order;
    return bessel_set(order, arg, BesselNeed::k_only).k_v.value();
}

}  // namespace condasian
