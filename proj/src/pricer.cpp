#include "condasian/pricer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "condasian/asian.hpp"
#include "condasian/errors.hpp"
#include "condasian/joint.hpp"
#include "condasian/moments.hpp"
#include "condasian/parallel.hpp"

namespace condasian {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_pricing_domain(double b, double x, double z, double s)
{
    if (!(b > 0.0 && x > b))
        throw NumericalError(ErrorKind::precondition, "Gurland integrand requires 0 < b < x");
    if (!(z > b)) throw NumericalError(ErrorKind::precondition, "Gurland integrand requires z > b");
    if (!(s > 0.0)) throw NumericalError(ErrorKind::precondition, "Gurland integrand requires s > 0");
}

MarketParams with_spot(const MarketParams& p, double b, double x)
{
    MarketParams q = p;
    q.b = b;
    q.x = x;
    return q;
}

// tau -> 0 value of (1/tau) Im Phi: Im(E1 - A1)/s, A1 = -i (x/(r-s) + z/s) being Y's coefficient.
double small_tau_limit(const MarketParams& p, double z, double s)
{
    const cplx e1 = e1_coefficient(p, s, z);
    const double a1 = -(p.x / (p.r - s) + z / s);
    return (e1.imag() - a1) / s;
}

GurlandSample sample(double b, double x, double z, double s, double tau, const MarketParams& params, bool want_dx,
                     bool* limit_used)
{
    const MarketParams p = with_spot(params, b, x);
    if (tau < kSmallTau) {
        if (s > p.r) {
            if (limit_used) *limit_used = true;
            GurlandSample g;
            g.value = small_tau_limit(p, z, s);
            if (want_dx) {
                const double h = 1e-6 * x;
                g.dx = (small_tau_limit(with_spot(params, b, x + h), z, s) -
                        small_tau_limit(with_spot(params, b, x - h), z, s)) /
                       (2.0 * h);
            }
            return g;
        }
        if (limit_used) *limit_used = false;
        tau = kSmallTau;
    }
    const TransformPoint tp = TransformPoint::gurland(s, tau, z);
    if (want_dx) {
        const PhiWithDx f = phi_with_dx(b, x, tp, p);
        return {f.value.imag() / tau, f.dx.imag() / tau};
    }
    return {phi(b, x, tp, p).imag() / tau, 0.0};
}

// ---------------------------------------------------------------------------
// Truncation of the tau integral from the analytic tail of Phi

constexpr double kTailSafety = 10.0;

struct TailBound {
    double amplitude = 0.0;  // |C|
    double decay = 0.0;      // Re a
};

TailBound tail_bound(double b, double x, double z, double s, const MarketParams& p)
{
    // The amplitude is singular at z = x; bracket it by nearby points instead.
    const double band = 0.02 * x;
    std::vector<double> zs;
    if (std::abs(z - x) < band) {
        zs = {x - band, x + band};
        if (zs[0] <= b) zs.erase(zs.begin());
    } else {
        zs = {z};
    }
    TailBound t{0.0, std::numeric_limits<double>::infinity()};
    for (double zz : zs) {
        const TailEstimate e = phi_tail(b, x, zz, cplx(s, 0.0), p);
        t.amplitude = std::max(t.amplitude, std::abs(e.amplitude));
        t.decay = std::min(t.decay, e.decay_a.real());
    }
    return t;
}

// Bound on int_{V^2}^inf |(1/tau) Im Phi| dtau and its x-derivative counterpart.
double tail_integral(const TailBound& t, double V)
{
    // 2|C| int_V^inf v^{-2} e^{-c v} dv <= 2|C| e^{-c V} / (c V^2)
    return kTailSafety * 2.0 * t.amplitude * std::exp(-t.decay * V) / (t.decay * V * V);
}

double choose_cutoff(const TailBound& t, double target)
{
    if (!(t.decay > 0.0)) throw NumericalError(ErrorKind::truncation, "tail envelope does not decay");
    double lo = 0.5, hi = 1.0;
    while (tail_integral(t, hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e5) throw NumericalError(ErrorKind::truncation, "no finite cutoff meets the tail tolerance");
    }
    if (tail_integral(t, lo) <= target) return lo;
    for (int i = 0; i < 60 && hi - lo > 1e-3 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail_integral(t, mid) > target ? lo : hi) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) on the substituted variable v = sqrt(tau)

struct Panel {
    double lo, hi;
    std::array<double, 2> value, error;
};

using Integrand = std::function<std::array<double, 2>(double)>;

Panel gk15(const Integrand& f, double lo, double hi)
{
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    std::array<double, 2> kr{}, ga{};
    const auto f0 = f(c);
    for (int j = 0; j < 2; ++j) {
        kr[j] = wk[0] * f0[j];
        ga[j] = wg[0] * f0[j];
    }
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const auto fp = f(c + h * xk[i]);
        const auto fm = f(c - h * xk[i]);
        for (int j = 0; j < 2; ++j) {
            kr[j] += wk[i] * (fp[j] + fm[j]);
            if (i % 2 == 0) ga[j] += wg[i / 2] * (fp[j] + fm[j]);
        }
    }
    Panel p{lo, hi, {}, {}};
    for (int j = 0; j < 2; ++j) {
        p.value[j] = kr[j] * h;
        p.error[j] = std::abs((kr[j] - ga[j]) * h);
    }
    return p;
}

constexpr int kInitialPanels = 16;
constexpr int kMaxPanels = 4000;

std::array<double, 2> integrate(const Integrand& f, double V, double tol, int& panels_used, double& err_out)
{
    std::vector<Panel> panels;
    panels.reserve(kInitialPanels * 4);
    for (int i = 0; i < kInitialPanels; ++i)
        panels.push_back(gk15(f, V * i / kInitialPanels, V * (i + 1) / kInitialPanels));
    auto panel_err = [](const Panel& p) { return std::max(p.error[0], p.error[1]); };
    for (;;) {
        double total = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const double e = panel_err(panels[i]);
            total += e;
            if (e > panel_err(panels[worst])) worst = i;
        }
        if (total <= tol) {
            err_out = total;
            break;
        }
        if (static_cast<int>(panels.size()) >= kMaxPanels)
            throw NumericalError(ErrorKind::quadrature, "adaptive quadrature did not reach tolerance " +
                                                            std::to_string(tol) + " (estimate " +
                                                            std::to_string(total) + ")");
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.lo + p.hi);
        panels[worst] = gk15(f, p.lo, mid);
        panels.push_back(gk15(f, mid, p.hi));
    }
    // Sum in position order so the result does not depend on the refinement history.
    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    std::array<double, 2> sum{0.0, 0.0};
    for (const auto& p : panels)
        for (int j = 0; j < 2; ++j) sum[j] += p.value[j];
    panels_used = static_cast<int>(panels.size());
    return sum;
}

double trapezoid(const std::vector<double>& v, double h)
{
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

}  // namespace

double gurland_integrand(double b, double x, double z, double s, double tau, const MarketParams& params)
{
    require_pricing_domain(b, x, z, s);
    if (tau < 0.0) throw NumericalError(ErrorKind::precondition, "tau must be >= 0");
    return sample(b, x, z, s, tau, params, false, nullptr).value;
}

GurlandSample gurland_integrand_with_dx(double b, double x, double z, double s, double tau,
                                        const MarketParams& params)
{
    require_pricing_domain(b, x, z, s);
    if (tau < 0.0) throw NumericalError(ErrorKind::precondition, "tau must be >= 0");
    return sample(b, x, z, s, tau, params, true, nullptr);
}

DhatResult dhat_with_dx(double b, double x, double z, double s, const MarketParams& params, double tol,
                        bool want_dx)
{
    require_pricing_domain(b, x, z, s);
    if (!(tol > 0.0)) throw NumericalError(ErrorKind::precondition, "dhat tolerance must be > 0");
    const MarketParams p = with_spot(params, b, x);
    // Work in units of the tau integral; the result is divided by pi at the end.
    const double itol = tol * kPi;
    const TailBound tb = tail_bound(b, x, z, s, p);
    const double V = choose_cutoff(tb, 0.1 * itol);

    DhatResult out;
    bool limit_used = true;
    const Integrand f = [&](double v) -> std::array<double, 2> {
        bool used = true;
        const GurlandSample g = sample(b, x, z, s, v * v, p, want_dx, &used);
        if (!used) limit_used = false;
        return {2.0 * v * g.value, 2.0 * v * g.dx};
    };
    double qerr = 0.0;
    const auto sum = integrate(f, V, 0.9 * itol, out.panels, qerr);
    for (double v : sum)
        if (!std::isfinite(v)) throw NumericalError(ErrorKind::quadrature, "non-finite Gurland integral");
    out.value = sum[0] / kPi;
    out.dx = sum[1] / kPi;
    out.error_estimate = (qerr + tail_integral(tb, V)) / kPi;
    out.cutoff = V * V;
    out.endpoint_limit_used = limit_used;
    return out;
}

double dhat(double b, double x, double z, double s, const MarketParams& params, double tol)
{
    return dhat_with_dx(b, x, z, s, params, tol, false).value;
}

double d_value(double b, double x, double z, double T, const MarketParams& params, const InversionSpec& inv)
{
    inv.validate();
    if (z < 0.0) throw NumericalError(ErrorKind::precondition, "d_value needs z >= 0");
    const MarketParams p = with_spot(params, b, x);
    if (z <= b) return g0_distribution(p, z, T, inv);
    const int M = inv.gs_terms;
    const double tol = inv.tolerance();
    return invert_gs([&](double s) { return dhat(b, x, z, s, p, tol); }, T, M);
}

namespace {

// Im of int_V^inf (1/tau) sum_k A_k tau^{-(k+1)} dtau, stopped at the smallest term.
double asymptotic_tail(double x, double z, double s, const MarketParams& p, double V, double& error)
{
    // Optimal truncation on the complex terms; some coefficients are real, so their
    // imaginary parts alone say nothing about convergence.
    const auto coef = y_asymptotic_coefficients(p.sigma, p.r, cplx(s, 0.0), 24);
    double sum = 0.0, prev = std::numeric_limits<double>::infinity();
    double vp = 1.0;
    error = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        vp /= V;
        const cplx term = coef[k].eval(x, z) * vp / static_cast<double>(k + 1);
        error = std::abs(term);
        if (error > prev) break;
        sum += term.imag();
        prev = error;
    }
    return sum;
}

}  // namespace

GhatResult g0hat_gurland(double x, double z, double s, const MarketParams& params, double tol)
{
    if (!(x > 0.0 && z > 0.0)) throw NumericalError(ErrorKind::precondition, "g0hat needs x > 0 and z > 0");
    if (!(s > 0.0 && s > params.r)) throw NumericalError(ErrorKind::precondition, "g0hat needs s > max(r, 0)");
    if (std::abs(z - x) < 1e-3 * x) throw NumericalError(ErrorKind::precondition, "g0hat needs z away from x");
    if (!(tol > 0.0)) throw NumericalError(ErrorKind::precondition, "g0hat tolerance must be > 0");
    const MarketParams p = with_spot(params, 0.0, x);
    const double itol = tol * kPi;

    // Beyond V the integrand is the asymptotic series; what it misses is its own
    // truncation and the damped stationary-phase term, summed here over the tail.
    auto missed = [&](double V, double& tail, double& last) {
        tail = asymptotic_tail(x, z, s, p, V, last);
        double osc = 0.0;
        for (double t = V; t < 1e7; t *= 1.05) {
            const double term = y_oscillation_bound(x, z, t, cplx(s, 0.0), p) / t * (0.05 * t);
            osc += term;
            if (term <= 1e-6 * osc || term < 1e-300) break;
        }
        return last + kTailSafety * osc;
    };
    // The series is only trusted where y_value would pick it as well.
    auto series_regime = [&](double V) { return y_value(x, TransformPoint::gurland(s, V, z), p).asymptotic; };
    double V = 4.0, tail = 0.0, last = 0.0;
    while (missed(V, tail, last) > 0.1 * itol || !series_regime(V)) {
        V *= 1.1;
        if (V > 1e6) throw NumericalError(ErrorKind::truncation, "no finite cutoff for the Gurland integral of Y");
    }

    const double a1 = -(x / (p.r - s) + z / s);
    const Integrand f = [&](double v) -> std::array<double, 2> {
        const double tau = v * v;
        const double val = tau < kSmallTau
                               ? a1 / s
                               : y_value(x, TransformPoint::gurland(s, tau, z), p).value.imag() / tau;
        return {2.0 * v * val, 0.0};
    };
    GhatResult out;
    double qerr = 0.0;
    const auto sum = integrate(f, std::sqrt(V), 0.9 * itol, out.panels, qerr);
    if (!std::isfinite(sum[0])) throw NumericalError(ErrorKind::quadrature, "non-finite Gurland integral of Y");
    out.value = 0.5 / s - (sum[0] + tail) / kPi;
    out.error_estimate = (qerr + last) / kPi;
    out.cutoff = V;
    return out;
}

double ghat(double b, double x, double z, double s, const MarketParams& params, double tol)
{
    const double g0 = g0hat_gurland(x, z, s, params, 0.5 * tol).value;
    if (b == 0.0 || z <= b) return b == 0.0 ? g0 : 0.0;
    return g0 - dhat(b, x, z, s, params, 0.5 * tol);
}

double g_value_gurland(double b, double x, double z, double T, const MarketParams& params, const InversionSpec& inv)
{
    inv.validate();
    if (!(T > 0.0)) throw NumericalError(ErrorKind::precondition, "g_value_gurland needs T > 0");
    return invert_gs([&](double s) { return ghat(b, x, z, s, params, inv.tolerance()); }, T, inv.gs_terms);
}

// ---------------------------------------------------------------------------

namespace {

enum class ItemKind { g0, g0_dx, gurland };

struct Item {
    ItemKind kind;
    std::size_t zi;
    int node = 0;  // GS node index, 1-based
};

struct ItemResult {
    double value = 0.0, dx = 0.0;
    bool limit_used = true;
};

struct GridValues {
    std::vector<double> g0, d, d_dx;
    std::size_t gurland = 0, euler = 0;
    bool reduced_endpoint = false;
};

GridValues evaluate_grid(const MarketParams& p, double t, const std::vector<double>& z, const InversionSpec& inv,
                         bool want_dx, int threads, const std::function<void(std::size_t, std::size_t)>& progress)
{
    inv.validate();
    const int M = inv.gs_terms;
    const double tol = inv.tolerance();
    const double ln2 = std::log(2.0);
    std::vector<Item> items;
    for (std::size_t i = 0; i < z.size(); ++i) {
        items.push_back({ItemKind::g0, i});
        if (z[i] <= p.b) {
            if (want_dx) items.push_back({ItemKind::g0_dx, i});
        } else {
            for (int k = 1; k <= 2 * M; ++k) items.push_back({ItemKind::gurland, i, k});
        }
    }
    std::vector<ItemResult> results(items.size());
    std::mutex progress_mutex;
    std::size_t done = 0;
    parallel_for(items.size(), threads, [&](std::size_t n) {
        const Item& it = items[n];
        ItemResult& r = results[n];
        switch (it.kind) {
        case ItemKind::g0: r.value = g0_distribution(p, z[it.zi], t, inv); break;
        case ItemKind::g0_dx: r.value = g0_distribution_dx(p, z[it.zi], t, inv); break;
        case ItemKind::gurland: {
            const double s = it.node * ln2 / t;
            const DhatResult d = dhat_with_dx(p.b, p.x, z[it.zi], s, p, tol, want_dx);
            r.value = d.value;
            r.dx = d.dx;
            r.limit_used = d.endpoint_limit_used;
            break;
        }
        }
        if (progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress(++done, items.size());
        }
    });

    GridValues g;
    g.g0.assign(z.size(), 0.0);
    g.d.assign(z.size(), 0.0);
    g.d_dx.assign(z.size(), 0.0);
    std::vector<std::vector<double>> node_vals(z.size()), node_dx(z.size());
    for (std::size_t n = 0; n < items.size(); ++n) {
        const Item& it = items[n];
        const ItemResult& r = results[n];
        switch (it.kind) {
        case ItemKind::g0:
            g.g0[it.zi] = r.value;
            ++g.euler;
            break;
        case ItemKind::g0_dx:
            g.d_dx[it.zi] = r.value;
            ++g.euler;
            break;
        case ItemKind::gurland:
            node_vals[it.zi].push_back(r.value);
            node_dx[it.zi].push_back(r.dx);
            if (!r.limit_used) g.reduced_endpoint = true;
            ++g.gurland;
            break;
        }
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] <= p.b) {
            g.d[i] = g.g0[i];
        } else {
            g.d[i] = invert_gs(node_vals[i], t, M);
            if (want_dx) g.d_dx[i] = invert_gs(node_dx[i], t, M);
        }
    }
    return g;
}

std::vector<double> spread_grid(const MarketParams& p, double h)
{
    if (!(h > 0.0)) throw NumericalError(ErrorKind::precondition, "z step must be > 0");
    const double n = p.strike / h;
    const long nk = std::lround(n);
    if (std::abs(n - static_cast<double>(nk)) > 1e-9 * std::max(1.0, n) || nk < 1)
        throw NumericalError(ErrorKind::precondition, "z step must divide the strike");
    const double nb = p.b / h;
    if (std::abs(nb - std::round(nb)) > 1e-9 * std::max(1.0, nb))
        throw NumericalError(ErrorKind::precondition, "barrier must lie on the z grid");
    std::vector<double> z(static_cast<std::size_t>(nk) + 1);
    for (long i = 0; i <= nk; ++i) z[static_cast<std::size_t>(i)] = static_cast<double>(i) * h;
    // Snap the barrier and strike so the seam rule sees them exactly.
    z[static_cast<std::size_t>(std::lround(nb))] = p.b;
    z.back() = p.strike;
    return z;
}

}  // namespace

Valuation value_conditional_put(const MarketParams& params, const PricerOptions& opts, bool want_delta)
{
    params.validate_conditional();
    if (!(params.b > 0.0 && params.x > params.b))
        throw NumericalError(ErrorKind::precondition, "conditional pricing requires 0 < b < x");
    const double h = opts.z_step;
    const std::vector<double> z = spread_grid(params, h);
    const double T = params.maturity;
    const GridValues g = evaluate_grid(params, T, z, opts.inv, want_delta, opts.threads, opts.progress);

    Valuation v;
    const double disc = std::exp(-params.r * T);
    v.price.ap0 = asian_put_price(params, opts.inv);
    v.price.spread = disc * trapezoid(g.d, h);
    v.price.ap_b = v.price.ap0 - v.price.spread;
    if (want_delta) {
        v.delta.delta0 = asian_put_delta(params, opts.inv);
        v.delta.delta_spread = disc * trapezoid(g.d_dx, h);
        v.delta.delta_b = v.delta.delta0 - v.delta.delta_spread;
    }
    v.curve.z_grid = z;
    v.curve.g0 = g.g0;
    v.curve.d = g.d;
    v.curve.gb.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v.curve.gb[i] = z[i] <= params.b ? 0.0 : g.g0[i] - g.d[i];
    v.d_dx = g.d_dx;
    v.gurland_integrals = g.gurland;
    v.euler_inversions = g.euler + 1 + (want_delta ? 1 : 0);
    v.reduced_endpoint_accuracy = g.reduced_endpoint;
    return v;
}

double spread(const MarketParams& params, const InversionSpec& inv, double h, int threads)
{
    return price(params, inv, h, threads).spread;
}

PriceBreakdown price(const MarketParams& params, const InversionSpec& inv, double h, int threads)
{
    PricerOptions o;
    o.inv = inv;
    o.z_step = h;
    o.threads = threads;
    return value_conditional_put(params, o, false).price;
}

DeltaBreakdown delta(const MarketParams& params, const InversionSpec& inv, double h, int threads)
{
    PricerOptions o;
    o.inv = inv;
    o.z_step = h;
    o.threads = threads;
    return value_conditional_put(params, o, true).delta;
}

DistributionCurve g_curve(const MarketParams& params, double t, const std::vector<double>& z_grid,
                          const InversionSpec& inv, int threads,
                          const std::function<void(std::size_t, std::size_t)>& progress)
{
    params.validate();
    if (!(params.b > 0.0 && params.x > params.b))
        throw NumericalError(ErrorKind::precondition, "distribution curve requires 0 < b < x");
    if (!std::is_sorted(z_grid.begin(), z_grid.end()) ||
        std::adjacent_find(z_grid.begin(), z_grid.end()) != z_grid.end())
        throw NumericalError(ErrorKind::precondition, "z grid must be strictly ascending");
    const GridValues g = evaluate_grid(params, t, z_grid, inv, false, threads, progress);
    DistributionCurve c;
    c.z_grid = z_grid;
    c.g0 = g.g0;
    c.d = g.d;
    c.gb.resize(z_grid.size());
    for (std::size_t i = 0; i < z_grid.size(); ++i) c.gb[i] = z_grid[i] <= params.b ? 0.0 : g.g0[i] - g.d[i];
    return c;
}

std::vector<std::string> check_curve(const DistributionCurve& c, double b, double tol)
{
    std::vector<std::string> out;
    auto at = [&](std::size_t i) { return " at z=" + std::to_string(c.z_grid[i]); };
    for (std::size_t i = 0; i < c.z_grid.size(); ++i) {
        if (c.d[i] < -tol) out.push_back("D < 0" + at(i));
        if (c.g0[i] < -tol || c.g0[i] > 1.0 + tol) out.push_back("G0 outside [0,1]" + at(i));
        if (c.gb[i] < -tol || c.gb[i] > 1.0 + tol) out.push_back("Gb outside [0,1]" + at(i));
        if (c.z_grid[i] <= b && std::abs(c.gb[i]) > tol) out.push_back("Gb != 0 below the barrier" + at(i));
        if (c.gb[i] > c.g0[i] + tol) out.push_back("Gb > G0" + at(i));
        if (i > 0) {
            if (c.g0[i] < c.g0[i - 1] - tol) out.push_back("G0 decreasing" + at(i));
            if (c.gb[i] < c.gb[i - 1] - tol) out.push_back("Gb decreasing" + at(i));
        }
    }
    return out;
}

}  // namespace condasian
