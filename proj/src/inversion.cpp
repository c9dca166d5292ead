#include "condasian/inversion.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "condasian/errors.hpp"

namespace condasian {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

std::int64_t binom(int n, int k)
{
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double InversionSpec::tolerance() const
{
    return target_abs_tol > 0.0 ? target_abs_tol : std::pow(10.0, -2.2 * gs_terms);
}

void InversionSpec::validate() const
{
    if (gs_terms < 3 || gs_terms > 7) throw ConfigError("gs_terms must lie in [3, 7]");
    if (target_abs_tol < 0.0) throw ConfigError("target_abs_tol must be >= 0");
    if (euler_terms < 4 || euler_terms > 40) throw ConfigError("euler_terms must lie in [4, 40]");
}

std::vector<double> gs_weights(int M)
{
    if (M < 1 || M > 7) throw NumericalError(ErrorKind::precondition, "Gaver-Stehfest M must lie in [1, 7]");
    std::int64_t fact = 1;
    for (int i = 2; i <= M; ++i) fact *= i;
    std::vector<double> xi(2 * M);
    for (int k = 1; k <= 2 * M; ++k) {
        // Every summand j^{M+1} C(M,j) C(2j,j) C(j,k-j) / M! is an integer here
        // after summation; keep the numerator exact and divide once.
        std::int64_t num = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, M); ++j) {
            std::int64_t p = 1;
            for (int e = 0; e <= M; ++e) p *= j;
            num += p * binom(M, j) * binom(2 * j, j) * binom(j, k - j);
        }
        const double v = static_cast<double>(static_cast<long double>(num) / static_cast<long double>(fact));
        xi[k - 1] = ((M + k) % 2 == 0) ? v : -v;
    }
    return xi;
}

double invert_gs(std::span<const double> values, double t, int M)
{
    if (static_cast<int>(values.size()) != 2 * M)
        throw NumericalError(ErrorKind::precondition, "Gaver-Stehfest needs 2M transform values");
    const std::vector<double> xi = gs_weights(M);
    long double acc = 0.0L;
    for (int k = 0; k < 2 * M; ++k) acc += static_cast<long double>(xi[k]) * values[k];
    return static_cast<double>(acc * kLn2 / t);
}

double invert_gs(const std::function<double(double)>& transform, double t, int M)
{
    std::vector<double> values(2 * M);
    for (int k = 1; k <= 2 * M; ++k) values[k - 1] = transform(k * kLn2 / t);
    return invert_gs(values, t, M);
}

double invert_euler(const std::function<cplx(cplx)>& transform, double t, const InversionSpec& spec)
{
    if (!(t > 0.0)) throw NumericalError(ErrorKind::precondition, "Euler inversion needs t > 0");
    const int M = spec.euler_terms;
    const double shift = M * std::log(10.0) / 3.0;

    // eta_0 = 1/2, eta_k = (-1)^k for k <= M, then binomial tail weights.
    std::vector<double> eta(2 * M + 1);
    eta[0] = 0.5;
    for (int k = 1; k <= M; ++k) eta[k] = (k % 2 == 0) ? 1.0 : -1.0;
    double tail = std::ldexp(1.0, M);  // sum_{i=0}^{M} C(M,i)
    for (int j = 1; j <= M; ++j) {
        tail -= static_cast<double>(binom(M, M - j + 1));
        const int k = M + j;
        eta[k] = ((k % 2 == 0) ? 1.0 : -1.0) * std::ldexp(tail, -M);
    }

    double sum = 0.0, first = 0.0, last = 0.0;
    for (int k = 0; k <= 2 * M; ++k) {
        const double term = transform(cplx(shift, kPi * k) / t).real();
        if (!std::isfinite(term))
            throw NumericalError(ErrorKind::inversion_failure,
                                 "non-finite transform value at Euler node " + std::to_string(k));
        if (k <= 1) first = std::max(first, std::abs(term));
        last = std::abs(term);
        sum += eta[k] * term;
    }
    // Growing terms mean the transform is not analytic to the right of the
    // contour or has been evaluated wrongly.
    if (last > 1e3 * first) throw NumericalError(ErrorKind::inversion_failure, "Euler terms diverge");
    return std::pow(10.0, M / 3.0) / t * sum;
}

}  // namespace condasian
