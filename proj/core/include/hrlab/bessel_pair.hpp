#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hrlab/form_matrix.hpp"
#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::pairs {

enum class PairVerdict { Pair, NotPair, Inconclusive };

const char* verdict_name(PairVerdict v);

// Trace of the pair ODE (r^{d-1} V phi')' + r^{d-1} W phi = 0 integrated from
// the inner truncation radius with phi = 1, phi' = 0. Sampled values are
// rescaled so the largest magnitude is 1; solutions of these equations span
// hundreds of decades. The trace is cross-validated against a second
// integration at a coarser tolerance: past the point where the two disagree
// (recessive solutions drown in roundoff there) samples are not certified.
struct OdeTrace {
    std::vector<double> r;
    std::vector<double> phi;
    int validated = 0;            // leading samples that are certified
    double validated_r_max = 0.0;
    double min_phi = 0.0;         // over the validated prefix, in trace scaling
    bool all_positive = false;
    double residual = 0.0;        // normalized flux-form defect on the prefix
    bool ok = false;              // false on step underflow / blow-up of the stepper
    std::string message;
};

struct BesselCertificate {
    PairVerdict verdict = PairVerdict::Inconclusive;
    int dim = 0;
    double tol = 1e-6;
    OdeTrace ode;
    double form_margin = 0.0;     // smallest eigenvalue of the pair form difference
    bool form_converged = false;
    std::vector<double> witness_r;  // violating profile when not a pair
    std::vector<double> witness;
    std::string v_text;
    std::string w_text;
};

// Route 1: the ODE trace. Requires V > 0 at the grid nodes.
OdeTrace solve_pair_ode(const expr::WeightExpr& v, const expr::WeightExpr& w,
                        const expr::ParamBinding& binding, int d, const grid::Grid& g);

// Route 1 + route 2 (quadratic-form margin), combined into a verdict:
//   pair          min_phi > 0 on the validated trace AND form_margin >= -tol
//   not_pair      form_margin < -tol (violating profile attached)
//   inconclusive  otherwise
// The margin is normalized against the comparison mass (|W| + V/r^2) r^{d-1},
// which keeps it scale-free for power weights.
BesselCertificate is_bessel_pair(const expr::WeightExpr& v, const expr::WeightExpr& w,
                                 const expr::ParamBinding& binding, int d, const grid::Grid& g,
                                 double tol = 1e-6);

// The full second slot of the dimension-shifted pair:
//   (N-1) V / r^2 - (N-1) V'/r + W1 + N V'/r,  paired with dimension N+2.
std::pair<expr::WeightExpr, int> shift_dimension(const expr::WeightExpr& v,
                                                 const expr::WeightExpr& w1, int n);

// Normalized pointwise defect of the expanded pair ODE at radius r for given
// phi, phi', phi''; an oracle hook for closed-form solutions.
double ode_defect(const expr::WeightExpr& v, const expr::WeightExpr& w,
                  const expr::ParamBinding& binding, int d, double r, double phi, double dphi,
                  double d2phi);

}  // namespace hrlab::pairs
