#include "condasian/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "condasian/asian.hpp"
#include "condasian/errors.hpp"
#include "condasian/joint.hpp"
#include "condasian/mc_oracle.hpp"
#include "condasian/moments.hpp"

namespace condasian {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Check check(std::string name, bool pass, std::string detail) { return {std::move(name), pass, std::move(detail)}; }

std::string sigma_tag(double sigma) { return "sigma=" + fmt(sigma); }

MarketParams unit_maturity_market()
{
    MarketParams p;
    p.r = 0.05;
    p.sigma = 0.5;
    p.maturity = 1.0;
    p.x = 2.0;
    p.strike = 2.0;
    return p;
}

MarketParams market(double r, double sigma)
{
    MarketParams p;
    p.r = r;
    p.sigma = sigma;
    return p;
}

CriterionReport titled(std::string title)
{
    CriterionReport r;
    r.title = std::move(title);
    return r;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const std::array<ReferenceRow, 5>& reference_rows()
{
    static const std::array<ReferenceRow, 5> rows{{
        {0.6, 0.1669, 0.4026, 41.47, -0.1924, -0.2798, 68.76},
        {0.5, 0.1625, 0.3256, 49.92, -0.2029, -0.2859, 70.97},
        {0.4, 0.1530, 0.2465, 62.08, -0.2156, -0.2871, 75.11},
        {0.3, 0.1295, 0.1664, 77.86, -0.2316, -0.2782, 83.27},
        {0.2, 0.0810, 0.0877, 92.42, -0.2324, -0.2450, 94.84},
    }};
    return rows;
}

MarketParams five_year_market(double sigma)
{
    MarketParams p;
    p.r = 0.05;
    p.sigma = sigma;
    p.x = 2.0;
    p.b = 1.0;
    p.strike = 2.0;
    p.maturity = 5.0;
    return p;
}

bool CriterionReport::pass() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Validator::Validator(ValidationOptions opts) : opts_(std::move(opts)) {}

PricerOptions Validator::pricer_options(const std::string& stage) const
{
    PricerOptions o;
    o.threads = opts_.threads;
    if (opts_.progress) {
        auto cb = opts_.progress;
        o.progress = [cb, stage](std::size_t done, std::size_t total) { cb(stage, done, total); };
    }
    return o;
}

const Validator::RowResult& Validator::row(std::size_t i)
{
    if (auto it = rows_.find(i); it != rows_.end()) return it->second;
    const double sigma = reference_rows().at(i).sigma;
    const auto t0 = Clock::now();
    RowResult r;
    r.valuation = value_conditional_put(five_year_market(sigma), pricer_options(sigma_tag(sigma)), true);
    r.seconds = since(t0);
    return rows_[i] = std::move(r);
}

CriterionReport Validator::run(int id)
{
    const auto t0 = Clock::now();
    CriterionReport rep;
    switch (id) {
    case 1: rep = call_price(); break;
    case 2: rep = grid_prices(); break;
    case 3: rep = grid_deltas(); break;
    case 4: rep = closed_forms(); break;
    case 5: rep = properties(); break;
    case 6: rep = monte_carlo(); break;
    case 7: rep = small_volatility(); break;
    default: throw ConfigError("no criterion " + std::to_string(id));
    }
    rep.id = id;
    rep.seconds = since(t0);
    return rep;
}

CriterionReport Validator::call_price()
{
    CriterionReport rep = titled("unit-maturity Asian call via put-call parity");
    const auto t0 = Clock::now();
    const MarketParams p = unit_maturity_market();
    const double call = asian_call_via_parity(p, asian_put_price(p));
    const double secs = since(t0);
    const double ref = 0.2464156819;
    rep.checks.push_back(check("call", std::abs(call - ref) <= 5e-7,
                               "call=" + fmt(call) + " ref=" + fmt(ref) + " err=" + fmt(call - ref) + " tol=5e-7"));
    rep.checks.push_back(check("call.runtime", secs < 5.0, "seconds=" + fmt(secs) + " limit=5"));
    return rep;
}

CriterionReport Validator::grid_prices()
{
    CriterionReport rep = titled("five-year grid prices AP_b, AP_0 and their ratio");
    for (std::size_t i = 0; i < reference_rows().size(); ++i) {
        const ReferenceRow& ref = reference_rows()[i];
        const RowResult& r = row(i);
        const PriceBreakdown& pb = r.valuation.price;
        const std::string tag = sigma_tag(ref.sigma);
        const double ratio = 100.0 * pb.ap_b / pb.ap0;
        rep.checks.push_back(check(tag + ".ap_b", std::abs(pb.ap_b - ref.ap_b) <= 5e-4,
                                   "value=" + fmt(pb.ap_b) + " ref=" + fmt(ref.ap_b) + " tol=5e-4"));
        rep.checks.push_back(check(tag + ".ap0", std::abs(pb.ap0 - ref.ap0) <= 5e-4,
                                   "value=" + fmt(pb.ap0) + " ref=" + fmt(ref.ap0) + " tol=5e-4"));
        rep.checks.push_back(check(tag + ".ratio_pct", std::abs(ratio - ref.price_ratio_pct) <= 0.1,
                                   "value=" + fmt(ratio) + " ref=" + fmt(ref.price_ratio_pct) + " tol=0.1"));
        rep.checks.push_back(
            check(tag + ".runtime", r.seconds <= 300.0, "seconds=" + fmt(r.seconds) + " limit=300"));
    }
    return rep;
}

CriterionReport Validator::grid_deltas()
{
    CriterionReport rep = titled("five-year grid deltas and finite-difference check of delta_b");
    const double h = 1e-3;
    for (std::size_t i = 0; i < reference_rows().size(); ++i) {
        const ReferenceRow& ref = reference_rows()[i];
        const DeltaBreakdown& db = row(i).valuation.delta;
        const std::string tag = sigma_tag(ref.sigma);
        rep.checks.push_back(check(tag + ".delta_b", std::abs(db.delta_b - ref.delta_b) <= 2e-3,
                                   "value=" + fmt(db.delta_b) + " ref=" + fmt(ref.delta_b) + " tol=2e-3"));
        rep.checks.push_back(check(tag + ".delta0", std::abs(db.delta0 - ref.delta0) <= 2e-3,
                                   "value=" + fmt(db.delta0) + " ref=" + fmt(ref.delta0) + " tol=2e-3"));

        MarketParams up = five_year_market(ref.sigma), dn = up;
        up.x += h;
        dn.x -= h;
        const double pu = value_conditional_put(up, pricer_options(tag + " x+h"), false).price.ap_b;
        const double pd = value_conditional_put(dn, pricer_options(tag + " x-h"), false).price.ap_b;
        const double fd = (pu - pd) / (2.0 * h);
        rep.checks.push_back(check(tag + ".delta_b_fd", std::abs(fd - db.delta_b) <= 1e-3,
                                   "analytic=" + fmt(db.delta_b) + " fd=" + fmt(fd) + " h=1e-3 tol=1e-3"));
    }
    return rep;
}

CriterionReport Validator::closed_forms()
{
    CriterionReport rep = titled("closed-form joint transform examples");
    const TransformPoint tp{1.9, 2.5, 2.1};
    const double y = y_open(3.0, tp, market(-0.2, 0.1)).real();
    const double y0 = y0_limit(3.0, 1.9, 2.5, 2.1, -0.2).real();
    const double ph = phi(2.0, 3.0, tp, market(-0.2, 0.01)).real();
    const double ph0 = phi0_limit(2.0, 3.0, 1.9, 2.5, 2.1, -0.2).real();
    rep.checks.push_back(check("Y", std::abs(y - 0.094532) <= 1e-5, "value=" + fmt(y) + " ref=0.094532 tol=1e-5"));
    rep.checks.push_back(check("Y0", std::abs(y0 - 0.094501) <= 1e-6, "value=" + fmt(y0) + " ref=0.094501 tol=1e-6"));
    rep.checks.push_back(check("Phi", std::abs(ph / 1.873e-9 - 1.0) <= 0.01,
                               "value=" + fmt(ph) + " ref=1.873e-9 rel_tol=0.01"));
    rep.checks.push_back(
        check("Phi0", std::abs(ph0 - 1.504e-9) <= 1e-12, "value=" + fmt(ph0) + " ref=1.504e-9 tol=1e-12"));
    return rep;
}

CriterionReport Validator::properties()
{
    CriterionReport rep = titled("property suite");
    auto& out = rep.checks;

    {
        const MarketParams p = market(0.05, 0.5);
        const double mu = derive(p).mu;
        const TransformPoint tp{1.0, 0.5, 0.5};
        double worst = 0.0;
        for (double x : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
            const OdeSolutionPair f = fundamental_pair(x, tp, p);
            const cplx w = f.f1 * f.f2_deriv - f.f1_deriv * f.f2;
            worst = std::max(worst, rel(w, -0.5 * std::pow(x, -2.0 - mu)));
        }
        out.push_back(check("wronskian", worst <= 1e-9, "max_rel_err=" + fmt(worst) + " tol=1e-9"));
    }

    {
        const MarketParams p = market(0.05, 0.5);
        const TransformPoint tp{1.0, 0.4, 0.3};
        const double s2 = p.sigma * p.sigma;
        double worst_y = 0.0, worst_f = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double x = 0.2 * i, h = 1e-4 * x;
            const cplx f = y_open(x, tp, p), fp = y_open_deriv(x, tp, p);
            const cplx fpp = (y_open_deriv(x + h, tp, p) - y_open_deriv(x - h, tp, p)) / (2.0 * h);
            const cplx res = 0.5 * s2 * x * x * fpp + p.r * x * fp - (tp.alpha + tp.s + tp.beta * x) * f + 1.0;
            worst_y = std::max(worst_y, std::abs(res) / std::max(1.0, std::abs(f)));
        }
        const double b = 1.0;
        for (double x : {0.3, 0.6, 0.9, 1.2, 1.8, 3.0}) {
            const double h = 1e-3 * x;
            const cplx f = f_full(b, x, tp, p), fu = f_full(b, x + h, tp, p), fd = f_full(b, x - h, tp, p);
            const cplx fp = (fu - fd) / (2.0 * h), fpp = (fu - 2.0 * f + fd) / (h * h);
            const cplx killing = tp.s + (x > b ? tp.alpha + tp.beta * x : cplx(0.0));
            const cplx res = 0.5 * s2 * x * x * fpp + p.r * x * fp - killing * f + 1.0;
            worst_f = std::max(worst_f, std::abs(res) / std::max(1.0, std::abs(f)));
        }
        out.push_back(check("ode_residual.Y", worst_y <= 1e-6, "max=" + fmt(worst_y) + " tol=1e-6"));
        out.push_back(check("ode_residual.F", worst_f <= 1e-6, "max=" + fmt(worst_f) + " tol=1e-6"));
    }

    {
        const Dimensionless d = derive(0.05, 0.5);
        double worst = 0.0;
        for (double s : {0.5, 1.0, 2.0, 5.0}) worst = std::max(worst, std::abs(ptilde_big0(s, 1e16, d).real() * s - 1.0));
        out.push_back(check("total_probability", worst <= 1e-10, "max_err=" + fmt(worst) + " tol=1e-10"));
    }

    {
        const MarketParams p = market(0.05, 0.4);
        double worst = 0.0;
        for (double x : {0.5, 1.0, 2.0})
            for (double s : {0.2, 1.0, 3.0})
                worst = std::max(worst, std::abs(s * f_full(1.0, x, {s, 0.0, 0.0}, p) - 1.0));
        out.push_back(check("sF_normalization", worst <= 1e-12, "max_err=" + fmt(worst) + " tol=1e-12"));
    }

    {
        const MarketParams p = five_year_market(0.4);
        double worst = 0.0;
        for (double z : {1.2, 1.5, 1.9}) {
            const double lim = gurland_integrand(1.0, 2.0, z, 0.5, 1e-6, p);
            const double direct = phi(1.0, 2.0, TransformPoint::gurland(0.5, 1e-6, z), p).imag() / 1e-6;
            worst = std::max(worst, std::abs(lim - direct) / std::abs(direct));
        }
        out.push_back(check("endpoint_limit", worst <= 1e-4, "max_rel_err=" + fmt(worst) + " tol=1e-4"));
    }

    {
        McConfig cfg;
        cfg.n_paths = 1000000;
        cfg.seed = opts_.seed;
        cfg.threads = opts_.threads;
        for (double x : {2.0, 0.8}) {
            MarketParams p = unit_maturity_market();
            p.x = x;
            p.b = 1.0;
            const double s = 1.0;
            const auto [u, v] = mc_moments_exponential(p, s, cfg);
            const MomentSet m = mean_uv(p, s);
            const std::string tag = "moments.x=" + fmt(x);
            out.push_back(check(tag + ".U", std::abs(u.mean - m.mean_u) <= 3.0 * u.std_error,
                                "analytic=" + fmt(m.mean_u) + " mc=" + fmt(u.mean) + " se=" + fmt(u.std_error)));
            out.push_back(check(tag + ".V", std::abs(v.mean - m.mean_v) <= 3.0 * v.std_error,
                                "analytic=" + fmt(m.mean_v) + " mc=" + fmt(v.mean) + " se=" + fmt(v.std_error)));
        }
    }

    {
        const MarketParams p = five_year_market(0.4);
        McConfig cfg;
        cfg.n_paths = 100000;
        cfg.seed = opts_.seed;
        cfg.threads = opts_.threads;
        std::vector<unsigned char> bad(cfg.n_paths, 0);
        simulate(p, p.maturity, cfg, [&](long i, const PathSample& s) {
            if (s.u > 0.0 && std::max(p.strike - s.z, 0.0) > std::max(p.strike - s.y / p.maturity, 0.0)) bad[i] = 1;
        });
        const long n = std::count(bad.begin(), bad.end(), 1);
        out.push_back(check("payoff_dominance", n == 0, "violations=" + std::to_string(n) + " paths=100000"));
    }

    {
        struct Known {
            const char* name;
            double (*f)(double);
            double (*exact)(double);
        };
        const Known known[] = {
            {"1/s", [](double s) { return 1.0 / s; }, [](double) { return 1.0; }},
            {"1/(s+1)", [](double s) { return 1.0 / (s + 1.0); }, [](double t) { return std::exp(-t); }},
            {"1/s^2", [](double s) { return 1.0 / (s * s); }, [](double t) { return t; }},
        };
        for (const Known& k : known) {
            double worst = 0.0;
            for (double t : {0.5, 1.0, 5.0}) worst = std::max(worst, std::abs(invert_gs(k.f, t, 5) - k.exact(t)));
            out.push_back(check(std::string("gs_inversion.") + k.name, worst <= 1e-5,
                                "M=5 max_err=" + fmt(worst) + " tol=1e-5"));
        }
    }

    {
        double min_d = INFINITY, z_at = 0.0;
        bool ordered = true;
        for (std::size_t i = 0; i < reference_rows().size(); ++i) {
            const Valuation& v = row(i).valuation;
            for (std::size_t k = 0; k < v.curve.d.size(); ++k)
                if (v.curve.d[k] < min_d) {
                    min_d = v.curve.d[k];
                    z_at = v.curve.z_grid[k];
                }
            ordered = ordered && v.price.ap_b <= v.price.ap0;
        }
        out.push_back(check("D_nonnegative", min_d >= 0.0, "min_D=" + fmt(min_d) + " at z=" + fmt(z_at)));
        out.push_back(check("ap_b_below_ap0", ordered, ordered ? "all rows" : "violated"));
    }

    {
        const MarketParams p = five_year_market(0.4);
        const double s = std::numbers::ln2 / 5.0;
        double worst = 0.0;
        for (double z : {1.2, 1.5, 1.9}) {
            const TailEstimate t = phi_tail(1.0, 2.0, z, s, p);
            for (double tau = 1e3; tau <= 1e4 * (1 + 1e-12); tau *= std::pow(10.0, 0.125))
                worst = std::max(worst, std::abs(gurland_integrand(1.0, 2.0, z, s, tau, p)) / t.envelope(tau));
        }
        out.push_back(check("tail_envelope", worst <= 2.0, "max_ratio=" + fmt(worst) + " limit=2"));
    }
    return rep;
}

CriterionReport Validator::monte_carlo()
{
    CriterionReport rep = titled("Monte Carlo cross-check of AP_b");
    for (std::size_t i : {std::size_t{0}, std::size_t{2}}) {
        const double sigma = reference_rows()[i].sigma;
        const double analytic = row(i).valuation.price.ap_b;
        McConfig cfg;
        cfg.n_paths = 1000000;
        cfg.seed = opts_.seed;
        cfg.threads = opts_.threads;
        const auto t0 = Clock::now();
        const McEstimate mc = mc_price(five_year_market(sigma), Payoff::conditional_asian_put, cfg);
        const double secs = since(t0);
        const std::string tag = sigma_tag(sigma);
        rep.checks.push_back(check(tag + ".ap_b", std::abs(mc.mean - analytic) <= 3.0 * mc.std_error,
                                   "analytic=" + fmt(analytic) + " mc=" + fmt(mc.mean) + " se=" + fmt(mc.std_error) +
                                       " paths=" + std::to_string(mc.n_paths)));
        rep.checks.push_back(check(tag + ".runtime", secs <= 120.0, "seconds=" + fmt(secs) + " limit=120"));
    }
    return rep;
}

CriterionReport Validator::small_volatility()
{
    // G(0, x, z, t) tends to the indicator of t >= t0. Gaver-Stehfest maps a unit step at
    // t0 to a smooth curve whose value at t0 is c_M = sum_k xi_k 2^-k / k, whatever t0 is,
    // so the recovered step location is where the inverted curve crosses c_M.
    CriterionReport rep = titled("small-volatility step location");
    const double x = 2.0, z = 0.5, r = -0.2;
    const MarketParams p = market(r, 0.01);
    InversionSpec inv;
    inv.target_abs_tol = 1e-10;
    const double t0 = det_t0(1e-3, x, z, r);
    const std::vector<double> w = gs_weights(inv.gs_terms);
    double c_m = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) c_m += w[k] * std::ldexp(1.0, -static_cast<int>(k + 1)) / (k + 1);

    const double dt = 0.1;
    std::size_t done = 0;
    auto g = [&](double t) {
        const double v = g_value_gurland(0.0, x, z, t, p, inv);
        if (opts_.progress) opts_.progress("small sigma", ++done, 2);
        return v;
    };
    const double lo = g(t0 - dt), hi = g(t0 + dt);
    auto crossing = [&](double level, double& t) {
        if ((lo - level) * (hi - level) > 0.0) return false;
        t = t0 - dt + 2.0 * dt * (level - lo) / (hi - lo);
        return true;
    };
    const std::string values = "G(t0-0.1)=" + fmt(lo) + " G(t0+0.1)=" + fmt(hi);
    double tc = 0.0;
    if (crossing(c_m, tc))
        rep.checks.push_back(check("step_location", std::abs(tc - t0) <= 1e-2,
                                   "t_cross=" + fmt(tc) + " t0=" + fmt(t0) + " level=" + fmt(c_m) + " " + values +
                                       " tol=1e-2"));
    else
        rep.checks.push_back(check("step_location", false, "level " + fmt(c_m) + " not bracketed: " + values));
    // The half-way crossing sits away from t0 because GS smears the step; shown for reference only.
    double th = 0.0;
    rep.checks.push_back(check("half_level_info", true,
                               crossing(0.5, th) ? "t_cross(0.5)=" + fmt(th) + " offset=" + fmt(th - t0)
                                                 : "level 0.5 not bracketed"));
    return rep;
}

}  // namespace condasian
