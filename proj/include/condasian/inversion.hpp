#pragma once

#include <functional>
#include <span>
#include <vector>

#include "condasian/specfun.hpp"

namespace condasian {

enum class InversionAlgorithm { gaver_stehfest, euler };

struct InversionSpec {
    InversionAlgorithm algorithm = InversionAlgorithm::gaver_stehfest;
    int gs_terms = 5;              // M
    double target_abs_tol = 0.0;   // 0 selects 10^{-2.2 M}
    int euler_terms = 18;          // M: 2M+1 Bromwich nodes, binomial averaging over the last M

    double tolerance() const;
    void validate() const;
};

// Gaver-Stehfest weights xi_1..xi_{2M}, from exact integer arithmetic.
std::vector<double> gs_weights(int M);

// (ln2/t) sum_k xi_k f(k ln2/t), given the 2M transform values.
double invert_gs(std::span<const double> values, double t, int M);
double invert_gs(const std::function<double(double)>& transform, double t, int M);

// Euler summation of the Bromwich integral in the unified Abate-Whitt form.
double invert_euler(const std::function<cplx(cplx)>& transform, double t, const InversionSpec& spec = {});

}  // namespace condasian
