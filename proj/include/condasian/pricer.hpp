#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "condasian/inversion.hpp"
#include "condasian/model.hpp"

namespace condasian {

// (1/tau) Im Phi(b, x, s, i tau z, -i tau), the Gurland integrand. Below
// kSmallTau the tau -> 0 limit from the first moment coefficient is used.
constexpr double kSmallTau = 1e-4;

double gurland_integrand(double b, double x, double z, double s, double tau, const MarketParams& params);

struct GurlandSample {
    double value = 0.0;  // (1/tau) Im Phi
    double dx = 0.0;     // (1/tau) Im dPhi/dx
};
GurlandSample gurland_integrand_with_dx(double b, double x, double z, double s, double tau,
                                        const MarketParams& params);

// Laplace transform in t of D(b, x, z, t) = G(0, x, z, t) - G(b, x, z, t) at real s:
// (1/pi) int_0^inf (1/tau) Im Phi dtau.
struct DhatResult {
    double value = 0.0;
    double dx = 0.0;
    double error_estimate = 0.0;  // quadrature + truncation, in the units of value
    double cutoff = 0.0;          // tau beyond which the tail bound was used
    int panels = 0;
    bool endpoint_limit_used = true;  // false when s <= r forced direct evaluation near 0
};

DhatResult dhat_with_dx(double b, double x, double z, double s, const MarketParams& params, double tol,
                        bool want_dx = true);
double dhat(double b, double x, double z, double s, const MarketParams& params, double tol);

// D(b, x, z, T): G(0, x, z, T) for z <= b, Gaver-Stehfest over dhat otherwise.
double d_value(double b, double x, double z, double T, const MarketParams& params, const InversionSpec& inv = {});

// Laplace transform in t of G(0, x, z, t) at real s > max(r, 0), from the Gurland
// integral of Y: 1/(2s) - (1/pi) int_0^inf (1/tau) Im Y dtau. Beyond the cutoff the
// integrand is replaced by its asymptotic series, integrated term by term. Needs z != x.
struct GhatResult {
    double value = 0.0;
    double error_estimate = 0.0;
    double cutoff = 0.0;
    int panels = 0;
};
GhatResult g0hat_gurland(double x, double z, double s, const MarketParams& params, double tol);

// Transform of G(b, x, z, t) = G(0, x, z, t) - D(b, x, z, t); b = 0 gives G(0).
double ghat(double b, double x, double z, double s, const MarketParams& params, double tol);

// G(b, x, z, T) by Gaver-Stehfest over ghat.
double g_value_gurland(double b, double x, double z, double T, const MarketParams& params,
                       const InversionSpec& inv = {});

struct PriceBreakdown {
    double ap0 = 0.0;
    double spread = 0.0;
    double ap_b = 0.0;  // ap0 - spread
};

struct DeltaBreakdown {
    double delta0 = 0.0;
    double delta_spread = 0.0;
    double delta_b = 0.0;  // delta0 - delta_spread
};

enum class CurveKind { G, D };

struct DistributionCurve {
    std::vector<double> z_grid;
    std::vector<double> g0;  // G(0, x, z, t)
    std::vector<double> gb;  // G(b, x, z, t) = G(0) - D
    std::vector<double> d;   // D(b, x, z, t)
};

struct PricerOptions {
    InversionSpec inv;
    double z_step = 0.1;
    int threads = 0;
    // Called after each (z, s-node) work item; arguments are (done, total).
    std::function<void(std::size_t, std::size_t)> progress;
};

// Everything the spread integration produces; price, delta and curve are views of it.
struct Valuation {
    PriceBreakdown price;
    DeltaBreakdown delta;
    DistributionCurve curve;     // on the spread grid z = 0, h, ..., K, at t = T
    std::vector<double> d_dx;    // dD/dx on the same grid
    std::size_t gurland_integrals = 0;
    std::size_t euler_inversions = 0;
    bool reduced_endpoint_accuracy = false;
};

Valuation value_conditional_put(const MarketParams& params, const PricerOptions& opts = {}, bool want_delta = true);

double spread(const MarketParams& params, const InversionSpec& inv = {}, double h = 0.1, int threads = 0);
PriceBreakdown price(const MarketParams& params, const InversionSpec& inv = {}, double h = 0.1, int threads = 0);
DeltaBreakdown delta(const MarketParams& params, const InversionSpec& inv = {}, double h = 0.1, int threads = 0);

DistributionCurve g_curve(const MarketParams& params, double t, const std::vector<double>& z_grid,
                          const InversionSpec& inv = {}, int threads = 0,
                          const std::function<void(std::size_t, std::size_t)>& progress = {});

// Invariant violations of a curve beyond `tol` (monotone G, G(b, z) = 0 for z <= b,
// values in [0, 1], D >= 0). Empty when the curve is consistent.
std::vector<std::string> check_curve(const DistributionCurve& curve, double b, double tol);

}  // namespace condasian
