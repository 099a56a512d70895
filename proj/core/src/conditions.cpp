#include "hrlab/conditions.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "hrlab/band_matrix.hpp"

namespace hrlab::cond {

const char* condition_cli_name(ConditionId id) {
    switch (id) {
        case ConditionId::Con: return "con";
        case ConditionId::Con2: return "con2";
        case ConditionId::Con3: return "con3";
        case ConditionId::ConM: return "conm";
        case ConditionId::ConM2: return "conm2";
    }
    return "?";
}

ConditionId condition_from_name(const std::string& name) {
    if (name == "con") return ConditionId::Con;
    if (name == "con2") return ConditionId::Con2;
    if (name == "con3") return ConditionId::Con3;
    if (name == "conm") return ConditionId::ConM;
    if (name == "conm2") return ConditionId::ConM2;
    throw std::invalid_argument("unknown condition id '" + name + "'");
}

namespace {

struct PointwiseExpr {
    // violation(r) > 0 means the condition fails at r; scale(r) normalizes.
    const expr::WeightExpr* v;
    const expr::WeightExpr* w;
    expr::WeightExpr vp, vpp;
    const expr::ParamBinding* binding;
    ConditionId id;
    double n;

    // returns {signed expression, violation, normalization scale}
    void eval(double r, double& value, double& violation, double& scale) const {
        double vv = v->evaluate(r, *binding);
        double vp1 = vp.evaluate(r, *binding);
        double vp2 = vpp.evaluate(r, *binding);
        double r2 = r * r;
        if (id == ConditionId::Con) {
            double ww = w->evaluate(r, *binding);
            value = ww - 2.0 * vv / r2 + 2.0 * vp1 / r - vp2;
            violation = -value;
            scale = std::fabs(ww) + 2.0 * std::fabs(vv) / r2 + 2.0 * std::fabs(vp1) / r +
                    std::fabs(vp2);
        } else {
            double coeff = id == ConditionId::Con2 ? (n - 5.0) : (3.0 * n - 5.0);
            value = vp2 - 3.0 * vp1 / r - coeff * vv / r2;
            violation = value;
            scale = std::fabs(vp2) + 3.0 * std::fabs(vp1) / r + std::fabs(coeff * vv) / r2;
        }
        scale = std::max(scale, DBL_MIN);
    }
};

}  // namespace

ConditionReport check_pointwise(ConditionId id, const expr::WeightExpr& v,
                                const std::optional<expr::WeightExpr>& w,
                                const expr::ParamBinding& binding, const grid::RadialDomain& domain,
                                int samples, double tol) {
    if (id == ConditionId::ConM || id == ConditionId::ConM2)
        throw std::invalid_argument("check_pointwise: use check_integral for conm/conm2");
    if (id == ConditionId::Con && !w)
        throw std::invalid_argument("check_pointwise: condition con requires W");
    if (samples < 16) throw std::invalid_argument("check_pointwise: too few samples");
    if (!binding.n()) throw std::invalid_argument("check_pointwise: binding is missing N");

    PointwiseExpr pe{&v, w ? &*w : nullptr, v.derivative(), v.derivative().derivative(), &binding,
                     id, static_cast<double>(*binding.n())};

    const double r_lo = 1e-6 * std::min(domain.radius, 1.0);
    const double r_hi = domain.finite() ? domain.radius * (1.0 - 1e-6) : 1e6;
    const double t_lo = std::log(r_lo), t_hi = std::log(r_hi);

    ConditionReport rep;
    rep.id = id;
    rep.tol = tol;
    rep.samples = samples;

    double worst_violation = -1e300;
    double worst_r = r_lo, worst_value = 0.0, worst_scale = 1.0;
    double prev_violation = 0.0, prev_r = 0.0;

    auto consider = [&](double r) {
        double value, violation, scale;
        pe.eval(r, value, violation, scale);
        if (violation / scale > worst_violation) {
            worst_violation = violation / scale;
            worst_r = r;
            worst_value = value;
            worst_scale = scale;
        }
        return violation;
    };

    for (int i = 0; i < samples; ++i) {
        double r = std::exp(t_lo + (t_hi - t_lo) * i / (samples - 1.0));
        double violation = consider(r);
        // refine around sign changes of the expression
        if (i > 0 && ((violation > 0) != (prev_violation > 0))) {
            double a = prev_r, b = r;
            for (int it = 0; it < 60; ++it) {
                double mid = std::sqrt(a * b);
                double vm = consider(mid);
                if ((vm > 0) == (prev_violation > 0))
                    a = mid;
                else
                    b = mid;
            }
        }
        prev_violation = violation;
        prev_r = r;
    }

    rep.worst_r = worst_r;
    rep.worst_value = worst_value;
    rep.normalized_violation = worst_violation;
    rep.holds = worst_violation <= tol;
    (void)worst_scale;
    return rep;
}

ConditionReport check_integral(ConditionId id, const expr::WeightExpr& v,
                               const expr::WeightExpr& w, const expr::ParamBinding& binding,
                               int n, const grid::Grid& g, double tol) {
    if (id != ConditionId::ConM && id != ConditionId::ConM2)
        throw std::invalid_argument("check_integral: use check_pointwise for con/con2/con3");

    for (int i = 0; i < g.size(); ++i) {
        double vv = v.evaluate(g.node(i), binding);
        if (vv < 0.0)
            throw std::invalid_argument("check_integral: V must be nonnegative on the grid");
    }

    const double kappa = id == ConditionId::ConM ? (3.0 * n - 9.0) : (5.0 * n - 9.0);
    expr::WeightExpr vp = v.derivative();
    expr::WeightExpr vpp = vp.derivative();

    forms::FormOptions opt;
    forms::FormMatrix q = forms::assemble_weighted_form(v, binding, -2, 1, n, g, opt);
    q.matrix().scale(2.0);
    forms::FormMatrix t = forms::assemble_weighted_form(vpp, binding, -2, 0, n, g, opt);
    q.add_scaled(-1.0, t);
    t = forms::assemble_weighted_form(vp, binding, -3, 0, n, g, opt);
    q.add_scaled(-(n - 5.0), t);
    t = forms::assemble_weighted_form(v, binding, -4, 0, n, g, opt);
    q.add_scaled(kappa, t);
    t = forms::assemble_weighted_form(w, binding, -2, 0, n, g, opt);
    q.add_scaled(-1.0, t);

    forms::FormMatrix mass = forms::mass_form(n - 3, g, opt);

    linalg::GenEigResult eig = linalg::smallest_generalized_eig(q.matrix(), mass.matrix());

    ConditionReport rep;
    rep.id = id;
    rep.tol = tol;
    rep.integral = true;
    rep.margin = eig.lambda;
    rep.holds = eig.converged && eig.lambda >= -tol;
    rep.samples = g.size();
    if (!rep.holds && eig.converged) {
        int stride = std::max(1, q.dofs() / 200);
        for (int i = 0; i < q.dofs(); i += stride) {
            rep.witness_r.push_back(q.dof_radius(i));
            rep.witness.push_back(eig.vec[static_cast<std::size_t>(i)]);
        }
    }
    return rep;
}

}  // namespace hrlab::cond
