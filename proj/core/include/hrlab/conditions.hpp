#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hrlab/form_matrix.hpp"
#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::cond {

enum class ConditionId { Con, Con2, Con3, ConM, ConM2 };

const char* condition_cli_name(ConditionId id);
ConditionId condition_from_name(const std::string& name);

struct ConditionReport {
    ConditionId id;
    bool holds = false;
    double tol = 0.0;

    // pointwise checks
    double worst_r = 0.0;
    double worst_value = 0.0;          // signed expression value at the worst point
    double normalized_violation = 0.0; // positive once the condition is violated
    int samples = 0;

    // integral checks
    bool integral = false;
    double margin = 0.0;               // min eigenvalue against the r^{N-3} mass
    std::vector<double> witness_r;
    std::vector<double> witness;
};

// Pointwise admissibility expressions sampled densely in log radius with
// bisection refinement around sign changes:
//   con   requires W:  W - 2V/r^2 + 2V'/r - V''        >= 0
//   con2:              V'' - 3V'/r - (N-5) V/r^2       <= 0
//   con3:              V'' - 3V'/r - (3N-5) V/r^2      <= 0
ConditionReport check_pointwise(ConditionId id, const expr::WeightExpr& v,
                                const std::optional<expr::WeightExpr>& w,
                                const expr::ParamBinding& binding, const grid::RadialDomain& domain,
                                int samples = 10000, double tol = 1e-9);

// Integral conditions as quadratic-form margins over clamped profiles:
//   Q[u] = 2 int V r^{N-3}|u'|^2 - int V'' r^{N-3}|u|^2 - (N-5) int V' r^{N-4}|u|^2
//          + kappa int V r^{N-5}|u|^2 - int W r^{N-3}|u|^2
// with kappa = 3N-9 (conm) or 5N-9 (conm2); holds iff the smallest eigenvalue
// against the r^{N-3} mass is >= -tol. Requires V >= 0 on the grid.
ConditionReport check_integral(ConditionId id, const expr::WeightExpr& v,
                               const expr::WeightExpr& w, const expr::ParamBinding& binding,
                               int n, const grid::Grid& g, double tol = 1e-6);

}  // namespace hrlab::cond
