#pragma once

#include <string>
#include <vector>

#include "hrlab/form_matrix.hpp"
#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::spectrum {

enum class Problem { Hardy, HardyRellich, Rellich };

const char* problem_cli_name(Problem p);
Problem problem_from_name(const std::string& name);

struct SpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigOutcome {
    double value = 0.0;
    std::vector<double> profile_r;
    std::vector<double> profile;
    bool converged = false;
    int iterations = 0;
};

// Smallest lambda with A u = lambda B u over the clamped space. B must be
// positive definite there; otherwise throws SpectrumError directing callers
// to the margin mode. mass is used only for diagnostics scaling of the
// returned profile. Deterministic shift-inverted iteration, residual
// tolerance 1e-10, at most 500 iterations; non-convergence is reported.
EigOutcome min_gen_eig(const forms::FormMatrix& a, const forms::FormMatrix& b,
                       const forms::FormMatrix& mass);

// Smallest eigenvalue of A - B against mass (margin mode; B may be indefinite).
EigOutcome margin_eig(const forms::FormMatrix& a, const forms::FormMatrix& b,
                      const forms::FormMatrix& mass);

// Pencils per problem family at mode k:
//   hardy:          A = int V r^{N-1}|u'|^2 + c_k int V r^{N-3}|u|^2,  B = int W r^{N-1}|u|^2
//   hardy_rellich:  A = hr_lhs_form(V),                                B = hr_rhs_form(W)
//   rellich:        A = hr_lhs_form(V = 1),                            B = int W r^{N-1}|u|^2
double best_constant(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                     const expr::ParamBinding& binding, int n, int k, const grid::Grid& g);

// Smallest eigenvalue of A - B normalized by the r^{N-1} mass; the mode-k
// inequality holds iff the margin is >= -tol.
double inequality_margin(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                         const expr::ParamBinding& binding, int n, int k, const grid::Grid& g);

// Closed-form best constants for the scale-invariant power weights
// (V = 1 with W = 1/r^2 for hardy and hardy-rellich, W = 1/r^4 for rellich):
// substitute u = r^s, s = sigma + i tau, and minimize the resulting rational
// function of tau by golden section on [0, 100].
double mellin_constant(Problem problem, int n, int k);

struct ModeResult {
    int k = 0;
    double value = 0.0;
    bool converged = false;
    double sensitivity = 0.0;
    bool failed = false;
    std::string error;
};

struct SpectralReport {
    Problem problem = Problem::HardyRellich;
    int n = 0;
    bool margin_mode = false;  // margins instead of best constants (signed W)
    std::vector<ModeResult> modes;
    int argmin_k = -1;
    double global_value = 0.0;
    bool radial_optimal = false;
    std::string v_text;
    std::string w_text;
    grid::GridSpec grid_spec;
};

// Per-mode constants (W >= 0 on the grid) or margins (signed W) for
// k = 0..kmax, with grid-sensitivity convergence flags.
SpectralReport mode_scan(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                         const expr::ParamBinding& binding, int n, int kmax,
                         const grid::RadialDomain& domain, grid::GridSpec spec,
                         bool with_sensitivity = true);

struct SymmetryVerdict {
    bool radial_optimal = false;
    int argmin_k = -1;
    double gap = 0.0;  // value(argmin) - value(k=0)
};

// Requires at least two converged modes.
SymmetryVerdict symmetry_verdict(const SpectralReport& report);

struct EquivalenceResult {
    double c_hr_radial = 0.0;   // radial (k=0) Hardy-Rellich constant in dim N
    double c_hardy_np2 = 0.0;   // Hardy constant in dim N+2, same weight
    double rel_diff = 0.0;
};

EquivalenceResult t51_equivalence_check(const expr::WeightExpr& w,
                                        const expr::ParamBinding& binding, int n,
                                        const grid::RadialDomain& domain, grid::GridSpec spec);

// Remainder constant of the shifted radial Hardy pencil on the ball of the
// given radius: smallest eigenvalue of
//   int r^{N-1}|u'|^2 - ((N-2)/2)^2 int r^{N-3}|u|^2  against  int r^{N-1}|u|^2
// with the inner truncation end left free (profiles need not vanish at the
// origin) and the Dirichlet clamp at r = R.
double brezis_vazquez_remainder(int n, double radius, grid::GridSpec spec);

}  // namespace hrlab::spectrum
