#include "hrlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hrlab/band_matrix.hpp"

namespace hrlab::spectrum {

const char* problem_cli_name(Problem p) {
    switch (p) {
        case Problem::Hardy: return "hardy";
        case Problem::HardyRellich: return "hardy-rellich";
        case Problem::Rellich: return "rellich";
    }
    return "?";
}

Problem problem_from_name(const std::string& name) {
    if (name == "hardy") return Problem::Hardy;
    if (name == "hardy-rellich" || name == "hardy_rellich") return Problem::HardyRellich;
    if (name == "rellich") return Problem::Rellich;
    throw SpectrumError("unknown problem '" + name + "' (expected hardy|hardy-rellich|rellich)");
}

namespace {

EigOutcome run_pencil(const forms::FormMatrix& a, const forms::FormMatrix& b) {
    linalg::GenEigResult eig = linalg::smallest_generalized_eig(a.matrix(), b.matrix());
    EigOutcome out;
    out.value = eig.lambda;
    out.converged = eig.converged;
    out.iterations = eig.iterations;
    int stride = std::max(1, a.dofs() / 512);
    for (int i = 0; i < a.dofs(); i += stride) {
        out.profile_r.push_back(a.dof_radius(i));
        out.profile.push_back(eig.vec[static_cast<std::size_t>(i)]);
    }
    return out;
}

struct Pencil {
    forms::FormMatrix a;
    forms::FormMatrix b;  // right-hand form of the ratio
};

Pencil problem_pencil(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                      const expr::ParamBinding& binding, int n, int k, const grid::Grid& g) {
    forms::FormOptions opt;
    Pencil p;
    switch (problem) {
        case Problem::Hardy:
            p.a = forms::hr_rhs_form(v, binding, n, k, g, opt);  // same shape: |u'|^2 + c_k |u|^2/r^2
            p.b = forms::rellich_rhs_form(w, binding, n, g, opt);
            break;
        case Problem::HardyRellich:
            p.a = forms::hr_lhs_form(v, binding, n, k, g, opt);
            p.b = forms::hr_rhs_form(w, binding, n, k, g, opt);
            break;
        case Problem::Rellich: {
            bool v_is_one = v.is_r_free();
            if (v_is_one) {
                expr::ParamBinding probe = binding;
                v_is_one = std::fabs(v.evaluate(1.0, probe) - 1.0) < 1e-14;
            }
            if (!v_is_one)
                throw SpectrumError("rellich pencils are defined with V = 1");
            p.a = forms::hr_lhs_form(expr::WeightExpr::constant(1.0), binding, n, k, g, opt);
            p.b = forms::rellich_rhs_form(w, binding, n, g, opt);
            break;
        }
    }
    return p;
}

bool weight_nonnegative(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                        const grid::Grid& g) {
    for (int i = 0; i < g.size(); ++i) {
        if (w.evaluate(g.node(i), binding) < 0.0) return false;
    }
    return true;
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::fabs(a) + std::fabs(b));
         ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

double scan_value(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                  const expr::ParamBinding& binding, int n, int k, const grid::Grid& g,
                  bool margin_mode, bool& converged) {
    Pencil p = problem_pencil(problem, v, w, binding, n, k, g);
    EigOutcome out;
    if (margin_mode) {
        forms::FormMatrix diff = p.a;
        diff.add_scaled(-1.0, p.b);
        forms::FormMatrix mass = forms::mass_form(n - 1, g);
        out = run_pencil(diff, mass);
    } else {
        out = run_pencil(p.a, p.b);
    }
    converged = out.converged;
    return out.value;
}

}  // namespace

EigOutcome min_gen_eig(const forms::FormMatrix& a, const forms::FormMatrix& b,
                       const forms::FormMatrix& mass) {
    (void)mass;
    if (!linalg::is_positive_definite(b.matrix(), 1e-12))
        throw SpectrumError(
            "right-hand form is indefinite; use the margin mode (inequality_margin)");
    return run_pencil(a, b);
}

EigOutcome margin_eig(const forms::FormMatrix& a, const forms::FormMatrix& b,
                      const forms::FormMatrix& mass) {
    forms::FormMatrix diff = a;
    diff.add_scaled(-1.0, b);
    return run_pencil(diff, mass);
}

double best_constant(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                     const expr::ParamBinding& binding, int n, int k, const grid::Grid& g) {
    Pencil p = problem_pencil(problem, v, w, binding, n, k, g);
    if (!linalg::is_positive_definite(p.b.matrix(), 1e-12))
        throw SpectrumError(
            "best_constant: right-hand form is indefinite; use inequality_margin");
    EigOutcome out = run_pencil(p.a, p.b);
    if (!out.converged) throw SpectrumError("best_constant: eigenvalue iteration did not converge");
    return out.value;
}

double inequality_margin(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                         const expr::ParamBinding& binding, int n, int k, const grid::Grid& g) {
    Pencil p = problem_pencil(problem, v, w, binding, n, k, g);
    forms::FormMatrix diff = p.a;
    diff.add_scaled(-1.0, p.b);
    forms::FormMatrix mass = forms::mass_form(n - 1, g);
    EigOutcome out = run_pencil(diff, mass);
    if (!out.converged)
        throw SpectrumError("inequality_margin: eigenvalue iteration did not converge");
    return out.value;
}

double mellin_constant(Problem problem, int n, int k) {
    if (n < 1 || k < 0) throw SpectrumError("mellin_constant: need N >= 1, k >= 0");
    const double ck = static_cast<double>(forms::mode_coeff(k, n));
    const double nn = static_cast<double>(n);

    switch (problem) {
        case Problem::Hardy: {
            // |s|^2 + c_k at s = (2-N)/2 + i tau
            double sr = (2.0 - nn) / 2.0;
            auto f = [&](double tau) { return sr * sr + tau * tau + ck; };
            return golden_min(f, 0.0, 100.0);
        }
        case Problem::HardyRellich: {
            double sr = (4.0 - nn) / 2.0;
            if (k == 0) {
                // ratio degenerates to |s-1|^2 + (N-1); min at tau = 0 is N^2/4
                auto f = [&](double tau) {
                    return (sr - 1.0) * (sr - 1.0) + tau * tau + (nn - 1.0);
                };
                return golden_min(f, 0.0, 100.0);
            }
            auto f = [&](double tau) {
                double s2 = sr * sr + tau * tau;
                double sm2 = (sr - 1.0) * (sr - 1.0) + tau * tau;
                double num = s2 * sm2 + (nn - 1.0 + 2.0 * ck) * s2 + ck * ck +
                             2.0 * (nn - 4.0) * ck;
                return num / (s2 + ck);
            };
            return golden_min(f, 0.0, 100.0);
        }
        case Problem::Rellich: {
            double sr = (4.0 - nn) / 2.0;
            auto f = [&](double tau) {
                double s2 = sr * sr + tau * tau;
                double sm2 = (sr - 1.0) * (sr - 1.0) + tau * tau;
                return s2 * sm2 + (nn - 1.0 + 2.0 * ck) * s2 + ck * ck + 2.0 * (nn - 4.0) * ck;
            };
            return golden_min(f, 0.0, 100.0);
        }
    }
    throw SpectrumError("mellin_constant: unreachable");
}

SpectralReport mode_scan(Problem problem, const expr::WeightExpr& v, const expr::WeightExpr& w,
                         const expr::ParamBinding& binding, int n, int kmax,
                         const grid::RadialDomain& domain, grid::GridSpec spec,
                         bool with_sensitivity) {
    if (kmax < 0) throw SpectrumError("mode_scan: kmax must be >= 0");
    grid::Grid g = grid::build_grid(domain, spec);

    SpectralReport rep;
    rep.problem = problem;
    rep.n = n;
    rep.v_text = v.to_string();
    rep.w_text = w.to_string();
    rep.grid_spec = g.spec();
    rep.margin_mode = !weight_nonnegative(w, binding, g);

    // probe grids for the sensitivity flags
    grid::GridSpec coarse = g.spec();
    coarse.m = std::max(coarse.m / 2, 64);
    grid::GridSpec shrunk = g.spec();
    {
        double ratio = shrunk.r_max / shrunk.r_min;
        double cut = std::pow(ratio, 0.05);
        shrunk.r_min *= cut;
        if (!domain.finite()) shrunk.r_max /= cut;
    }

    for (int k = 0; k <= kmax; ++k) {
        ModeResult mr;
        mr.k = k;
        try {
            bool conv = false;
            mr.value = scan_value(problem, v, w, binding, n, k, g, rep.margin_mode, conv);
            bool flag = conv;
            if (with_sensitivity) {
                bool c1 = false, c2 = false;
                grid::Grid g1 = grid::build_grid(domain, coarse);
                grid::Grid g2 = grid::build_grid(domain, shrunk);
                double v1 = scan_value(problem, v, w, binding, n, k, g1, rep.margin_mode, c1);
                double v2 = scan_value(problem, v, w, binding, n, k, g2, rep.margin_mode, c2);
                double scale = std::max({std::fabs(mr.value), 1e-12});
                mr.sensitivity =
                    std::max(std::fabs(mr.value - v1), std::fabs(mr.value - v2)) / scale;
                flag = flag && c1 && c2 && mr.sensitivity < 5e-3;
            }
            mr.converged = flag;
        } catch (const std::exception& e) {
            mr.failed = true;
            mr.error = e.what();
        }
        rep.modes.push_back(std::move(mr));
    }

    rep.argmin_k = -1;
    for (const ModeResult& mr : rep.modes) {
        if (mr.failed) continue;
        if (rep.argmin_k < 0 || mr.value < rep.global_value) {
            rep.argmin_k = mr.k;
            rep.global_value = mr.value;
        }
    }
    if (rep.argmin_k >= 0) {
        double v0 = 0.0;
        bool have0 = false;
        for (const ModeResult& mr : rep.modes)
            if (mr.k == 0 && !mr.failed) {
                v0 = mr.value;
                have0 = true;
            }
        double tie = 1e-9 * std::max(1.0, std::fabs(rep.global_value));
        rep.radial_optimal = have0 && v0 <= rep.global_value + tie;
    }
    return rep;
}

SymmetryVerdict symmetry_verdict(const SpectralReport& report) {
    int converged = 0;
    for (const ModeResult& mr : report.modes)
        if (!mr.failed && mr.converged) converged++;
    if (converged < 2)
        throw SpectrumError("symmetry_verdict: needs at least two converged modes");
    double v0 = 0.0;
    bool have0 = false;
    for (const ModeResult& mr : report.modes)
        if (mr.k == 0 && !mr.failed) {
            v0 = mr.value;
            have0 = true;
        }
    if (!have0 || report.argmin_k < 0)
        throw SpectrumError("symmetry_verdict: radial mode missing from the report");
    SymmetryVerdict out;
    out.argmin_k = report.argmin_k;
    out.radial_optimal = report.radial_optimal;
    out.gap = report.global_value - v0;
    return out;
}

EquivalenceResult t51_equivalence_check(const expr::WeightExpr& w,
                                        const expr::ParamBinding& binding, int n,
                                        const grid::RadialDomain& domain, grid::GridSpec spec) {
    grid::Grid g = grid::build_grid(domain, spec);
    if (!weight_nonnegative(w, binding, g))
        throw SpectrumError("t51_equivalence_check: W must be positive on the grid");

    expr::WeightExpr one = expr::WeightExpr::constant(1.0);
    EquivalenceResult out;
    out.c_hr_radial = best_constant(Problem::HardyRellich, one, w, binding, n, 0, g);

    grid::RadialDomain lifted(n + 2, domain.radius);
    grid::Grid g2 = grid::build_grid(lifted, spec);
    out.c_hardy_np2 = best_constant(Problem::Hardy, one, w, binding, n + 2, 0, g2);

    double scale = std::max(std::fabs(out.c_hr_radial), std::fabs(out.c_hardy_np2));
    out.rel_diff = scale > 0 ? std::fabs(out.c_hr_radial - out.c_hardy_np2) / scale : 0.0;
    return out;
}

double brezis_vazquez_remainder(int n, double radius, grid::GridSpec spec) {
    if (n < 2) throw SpectrumError("brezis_vazquez_remainder: needs N >= 2");
    grid::RadialDomain domain(n, radius);
    if (spec.r_max == 0.0) spec.r_max = radius;
    grid::Grid g = grid::build_grid(domain, spec);

    forms::FormOptions opt;
    opt.boundary = forms::Boundary::FreeInner;
    expr::WeightExpr one = expr::WeightExpr::constant(1.0);
    expr::ParamBinding binding;
    binding.set_n(n);

    forms::FormMatrix a = forms::pair_lhs_form(one, binding, n, g, opt);
    double shift = (n - 2.0) * (n - 2.0) / 4.0;
    if (shift != 0.0) {
        forms::FormMatrix hardy_mass = forms::mass_form(n - 3, g, opt);
        a.add_scaled(-shift, hardy_mass);
    }
    forms::FormMatrix mass = forms::mass_form(n - 1, g, opt);
    EigOutcome out = run_pencil(a, mass);
    if (!out.converged)
        throw SpectrumError("brezis_vazquez_remainder: eigenvalue iteration did not converge");
    return out.value;
}

}  // namespace hrlab::spectrum
