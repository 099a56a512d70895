#pragma once

#include <functional>
#include <vector>

#include "hrlab/form_matrix.hpp"
#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::forms {

// A smooth radial profile with analytic derivatives, compactly supported in
// (support_lo, support_hi).
struct RadialProfile {
    int k = 0;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

// C^2 bump (r-a)^3 (b-r)^3, normalized to unit peak, zero outside (a,b).
RadialProfile bump_profile(int k, double a, double b);

struct DecomposeResult {
    double residual = 0.0;   // max of the two relative discrepancies
    double lhs_3d = 0.0;     // int |Delta u|^2 by 3-D quadrature
    double lhs_modes = 0.0;  // sum of the per-mode 1-D forms
    double rhs_3d = 0.0;     // int W |grad u|^2 by 3-D quadrature
    double rhs_modes = 0.0;
};

// Validation of the mode decomposition in dimension N = 3 with zonal
// harmonics for k = 0, 1, 2: builds u(x) = sum_k u_k(r) Y_k(theta) on a
// product quadrature (Gauss panels in r x Gauss in cos theta), integrates
// |Delta u|^2 and W |grad u|^2 directly, and compares against the sums of the
// assembled 1-D mode forms on the given grid.
DecomposeResult decompose_check(const std::vector<RadialProfile>& profiles,
                                const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                const grid::Grid& g);

}  // namespace hrlab::forms
