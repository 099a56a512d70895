#include "hrlab/bessel_pair.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>

#include "hrlab/band_matrix.hpp"

namespace hrlab::pairs {

const char* verdict_name(PairVerdict v) {
    switch (v) {
        case PairVerdict::Pair: return "pair";
        case PairVerdict::NotPair: return "not_pair";
        case PairVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

struct OdeSample {
    double phi = 0.0;      // scaled
    double psi = 0.0;      // scaled d(phi)/dt
    int log2scale = 0;
    double defect = 0.0;   // normalized flux defect up to this node
    bool sampled = false;
};

struct OdeRun {
    std::vector<OdeSample> samples;
    bool ok = false;
    std::string message;
};

struct Rhs {
    const expr::WeightExpr& v;
    const expr::WeightExpr& vprime;
    const expr::WeightExpr& w;
    const expr::ParamBinding& binding;
    int d;

    // y' for y = (phi, d(phi)/dt) in t = log r.
    void operator()(double t, const double y[2], double dy[2]) const {
        double r = std::exp(t);
        double vv = v.evaluate(r, binding);
        if (!(vv > 0.0)) throw expr::EvalError("V must stay positive along the integration", 0);
        double vp = vprime.evaluate(r, binding);
        double ww = w.evaluate(r, binding);
        double p = (d - 2) + r * vp / vv;
        double q = r * r * ww / vv;
        dy[0] = y[1];
        dy[1] = -p * y[1] - q * y[0];
    }

    double w_times_measure(double t, double phi) const {
        double r = std::exp(t);
        return std::pow(r, d) * w.evaluate(r, binding) * phi;
    }

    double flux(double t, double psi) const {
        double r = std::exp(t);
        return std::pow(r, d - 2) * v.evaluate(r, binding) * psi;
    }
};

// Dormand-Prince 5(4) pair.
struct Dp45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

double hermite(double th, double h, double f0, double d0, double f1, double d1) {
    double th2 = th * th, th3 = th2 * th;
    return (2 * th3 - 3 * th2 + 1) * f0 + (th3 - 2 * th2 + th) * h * d0 +
           (-2 * th3 + 3 * th2) * f1 + (th3 - th2) * h * d1;
}

double hermite_deriv(double th, double h, double f0, double d0, double f1, double d1) {
    double th2 = th * th;
    return (6 * th2 - 6 * th) * f0 / h + (3 * th2 - 4 * th + 1) * d0 +
           (6 * th - 6 * th2) * f1 / h + (3 * th2 - 2 * th) * d1;
}

OdeRun integrate(const Rhs& rhs, const grid::Grid& g, int last_node, double rtol) {
    OdeRun run;
    const int m = g.size();
    run.samples.assign(static_cast<std::size_t>(m), {});

    const double t_end = std::log(g.node(last_node));
    double t = std::log(g.node(0));
    double y[2] = {1.0, 0.0};
    int log2scale = 0;

    // Flux-form bookkeeping: F(t) - F(t0) + int r^d W phi dt should vanish.
    double f0;
    try {
        f0 = rhs.flux(t, y[1]);
    } catch (const expr::EvalError& e) {
        run.message = std::string("weight evaluation failed at the inner end: ") + e.what();
        return run;
    }
    double integral = 0.0;
    double flux_scale = std::fabs(f0);
    double defect_max = 0.0;
    double l2max = 0.0;  // running max of log2(state magnitude)

    run.samples[0] = {y[0], y[1], 0, 0.0, true};

    int next_node = 1;
    double h = std::min(0.05, (t_end - t) / 16.0);
    const double hmin = 1e-13 * std::max(1.0, std::fabs(t_end - t));
    long max_steps = 4000000;
    double k1[2];
    try {
        rhs(t, y, k1);
    } catch (const expr::EvalError& e) {
        run.message = std::string("weight evaluation failed: ") + e.what();
        return run;
    }

    while (t < t_end && next_node <= last_node) {
        if (--max_steps < 0) {
            run.message = "step limit exceeded";
            return run;
        }
        if (h < hmin) {
            run.message = "step size underflow";
            return run;
        }
        if (t + h > t_end) h = t_end - t;

        double k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2], ynew[2];
        try {
            yt[0] = y[0] + h * Dp45::a21 * k1[0];
            yt[1] = y[1] + h * Dp45::a21 * k1[1];
            rhs(t + Dp45::c2 * h, yt, k2);
            yt[0] = y[0] + h * (Dp45::a31 * k1[0] + Dp45::a32 * k2[0]);
            yt[1] = y[1] + h * (Dp45::a31 * k1[1] + Dp45::a32 * k2[1]);
            rhs(t + Dp45::c3 * h, yt, k3);
            yt[0] = y[0] + h * (Dp45::a41 * k1[0] + Dp45::a42 * k2[0] + Dp45::a43 * k3[0]);
            yt[1] = y[1] + h * (Dp45::a41 * k1[1] + Dp45::a42 * k2[1] + Dp45::a43 * k3[1]);
            rhs(t + Dp45::c4 * h, yt, k4);
            yt[0] = y[0] + h * (Dp45::a51 * k1[0] + Dp45::a52 * k2[0] + Dp45::a53 * k3[0] +
                                Dp45::a54 * k4[0]);
            yt[1] = y[1] + h * (Dp45::a51 * k1[1] + Dp45::a52 * k2[1] + Dp45::a53 * k3[1] +
                                Dp45::a54 * k4[1]);
            rhs(t + Dp45::c5 * h, yt, k5);
            yt[0] = y[0] + h * (Dp45::a61 * k1[0] + Dp45::a62 * k2[0] + Dp45::a63 * k3[0] +
                                Dp45::a64 * k4[0] + Dp45::a65 * k5[0]);
            yt[1] = y[1] + h * (Dp45::a61 * k1[1] + Dp45::a62 * k2[1] + Dp45::a63 * k3[1] +
                                Dp45::a64 * k4[1] + Dp45::a65 * k5[1]);
            rhs(t + h, yt, k6);
            for (int i = 0; i < 2; ++i)
                ynew[i] = y[i] + h * (Dp45::b1 * k1[i] + Dp45::b3 * k3[i] + Dp45::b4 * k4[i] +
                                      Dp45::b5 * k5[i] + Dp45::b6 * k6[i]);
            rhs(t + h, ynew, k7);
        } catch (const expr::EvalError& e) {
            run.message = std::string("weight evaluation failed: ") + e.what();
            return run;
        }

        double sc = std::max({std::fabs(y[0]), std::fabs(y[1]), std::fabs(ynew[0]),
                              std::fabs(ynew[1]), 1e-30});
        double errn = 0.0;
        for (int i = 0; i < 2; ++i) {
            double err = h * (Dp45::e1 * k1[i] + Dp45::e3 * k3[i] + Dp45::e4 * k4[i] +
                              Dp45::e5 * k5[i] + Dp45::e6 * k6[i] + Dp45::e7 * k7[i]);
            errn = std::max(errn, std::fabs(err) / (rtol * sc));
        }
        if (errn > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(errn, -0.2));
            continue;
        }

        // accepted: accumulate the W integral with per-step Gauss points
        static const double gx[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
        static const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
        bool eval_failed = false;
        for (int q = 0; q < 3 && !eval_failed; ++q) {
            double th = gx[q];
            double phi_q = hermite(th, h, y[0], k1[0], ynew[0], k7[0]);
            try {
                integral += gw[q] * h * rhs.w_times_measure(t + th * h, phi_q);
            } catch (const expr::EvalError& e) {
                run.message = std::string("weight evaluation failed: ") + e.what();
                eval_failed = true;
            }
        }
        if (eval_failed) return run;

        // sample nodes inside (t, t+h]
        while (next_node <= last_node) {
            double tn = std::log(g.node(next_node));
            if (tn > t + h * (1.0 + 1e-14)) break;
            double th = std::min(std::max((tn - t) / h, 0.0), 1.0);
            OdeSample s;
            s.phi = hermite(th, h, y[0], k1[0], ynew[0], k7[0]);
            s.psi = hermite_deriv(th, h, y[0], k1[0], ynew[0], k7[0]);
            s.log2scale = log2scale;
            double fn;
            try {
                fn = rhs.flux(tn, s.psi);
            } catch (const expr::EvalError& e) {
                run.message = std::string("weight evaluation failed: ") + e.what();
                return run;
            }
            // the integral accumulated so far runs to t+h; correct back to tn
            // by the same Gauss rule on [tn, t+h]
            double correction = 0.0;
            double hc = t + h - tn;
            if (hc > 0) {
                for (int q = 0; q < 3; ++q) {
                    double thq = (tn - t + hc * gx[q]) / h;
                    double phi_q = hermite(thq, h, y[0], k1[0], ynew[0], k7[0]);
                    try {
                        correction += gw[q] * hc * rhs.w_times_measure(tn + gx[q] * hc, phi_q);
                    } catch (const expr::EvalError&) {
                        correction = 0.0;
                        break;
                    }
                }
            }
            double integral_at_node = integral - correction;
            flux_scale = std::max({flux_scale, std::fabs(fn), std::fabs(integral_at_node)});
            double defect = std::fabs(fn - f0 + integral_at_node) / std::max(flux_scale, DBL_MIN);
            defect_max = std::max(defect_max, defect);
            s.defect = defect_max;
            s.sampled = true;
            run.samples[static_cast<std::size_t>(next_node)] = s;
            next_node++;
        }

        t += h;
        y[0] = ynew[0];
        y[1] = ynew[1];
        k1[0] = k7[0];
        k1[1] = k7[1];
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(errn, 1e-10), -0.2)));

        // renormalize the state; solutions span hundreds of decades
        double mag = std::max(std::fabs(y[0]), std::fabs(y[1]));
        if (mag > 0) {
            double l2 = std::log2(mag) + log2scale;
            l2max = std::max(l2max, l2);
            if (l2 < l2max - 960.0) {
                run.ok = true;
                run.message = "solution decayed below representable range; trace truncated";
                return run;
            }
            int e = std::ilogb(mag);
            if (e > 360 || e < -360) {
                y[0] = std::ldexp(y[0], -e);
                y[1] = std::ldexp(y[1], -e);
                k1[0] = std::ldexp(k1[0], -e);
                k1[1] = std::ldexp(k1[1], -e);
                f0 = std::ldexp(f0, -e);
                integral = std::ldexp(integral, -e);
                flux_scale = std::ldexp(flux_scale, -e);
                log2scale += e;
            }
        } else {
            run.ok = true;
            run.message = "solution vanished identically; trace truncated";
            return run;
        }
    }
    run.ok = true;
    return run;
}

int find_evaluable_prefix(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                          const grid::Grid& g) {
    int last = -1;
    for (int i = 0; i < g.size(); ++i) {
        try {
            double val = w.evaluate(g.node(i), binding);
            if (!std::isfinite(val)) break;
        } catch (const expr::EvalError&) {
            break;
        }
        last = i;
    }
    return last;
}

}  // namespace

OdeTrace solve_pair_ode(const expr::WeightExpr& v, const expr::WeightExpr& w,
                        const expr::ParamBinding& binding, int d, const grid::Grid& g) {
    if (d < 1) throw std::invalid_argument("solve_pair_ode: dimension d must be >= 1");
    for (int i = 0; i < g.size(); ++i) {
        double vv;
        try {
            vv = v.evaluate(g.node(i), binding);
        } catch (const expr::EvalError& e) {
            throw std::invalid_argument(std::string("solve_pair_ode: V evaluation failed: ") +
                                        e.what());
        }
        if (!(vv > 0.0))
            throw std::invalid_argument("solve_pair_ode: V vanishes (or is negative) at a node");
    }
    int last_node = find_evaluable_prefix(w, binding, g);
    if (last_node < 4)
        throw std::invalid_argument("solve_pair_ode: W is not evaluable on the grid");

    expr::WeightExpr vprime = v.derivative();
    Rhs rhs{v, vprime, w, binding, d};

    OdeRun main_run = integrate(rhs, g, last_node, 1e-12);
    OdeRun check_run = integrate(rhs, g, last_node, 3e-10);

    OdeTrace out;
    out.ok = main_run.ok;
    out.message = main_run.message;

    // Cross-validate the two integrations node by node; certify the prefix on
    // which they agree.
    int validated = 0;
    int sampled = 0;
    for (int i = 0; i <= last_node; ++i) {
        const OdeSample& a = main_run.samples[static_cast<std::size_t>(i)];
        const OdeSample& b = check_run.samples[static_cast<std::size_t>(i)];
        if (!a.sampled) break;
        sampled = i + 1;
        if (!b.sampled) continue;
        int dk = a.log2scale - b.log2scale;
        if (std::abs(dk) > 200) continue;  // runs live in wildly different scales: noise
        double bphi = std::ldexp(b.phi, -dk);
        double bpsi = std::ldexp(b.psi, -dk);
        double num = std::hypot(a.phi - bphi, a.psi - bpsi);
        double den = std::hypot(a.phi, a.psi) + std::hypot(bphi, bpsi);
        if (den == 0.0 || num / den > 1e-5) continue;
        if (validated == i) validated = i + 1;
    }
    if (validated == 0 && sampled > 0) validated = 1;

    out.validated = validated;
    out.validated_r_max = validated > 0 ? g.node(validated - 1) : g.node(0);

    // Common normalization across the sampled prefix: largest |phi| becomes 1.
    double l2_max = -1e300;
    for (int i = 0; i < sampled; ++i) {
        const OdeSample& s = main_run.samples[static_cast<std::size_t>(i)];
        if (s.phi != 0.0) l2_max = std::max(l2_max, std::log2(std::fabs(s.phi)) + s.log2scale);
    }
    out.r.resize(static_cast<std::size_t>(sampled));
    out.phi.resize(static_cast<std::size_t>(sampled));
    bool all_pos = validated > 0;
    double min_phi = 1e300;
    for (int i = 0; i < sampled; ++i) {
        const OdeSample& s = main_run.samples[static_cast<std::size_t>(i)];
        out.r[static_cast<std::size_t>(i)] = g.node(i);
        double value = 0.0;
        if (s.phi != 0.0) {
            double l2 = std::log2(std::fabs(s.phi)) + s.log2scale - l2_max;
            value = (s.phi > 0 ? 1.0 : -1.0) * std::exp2(std::max(l2, -1000.0));
            if (value == 0.0) value = s.phi > 0 ? DBL_MIN : -DBL_MIN;
        }
        out.phi[static_cast<std::size_t>(i)] = value;
        if (i < validated) {
            if (!(value > 0.0)) all_pos = false;
            min_phi = std::min(min_phi, value);
        }
    }
    out.all_positive = all_pos;
    out.min_phi = validated > 0 ? min_phi : 0.0;
    out.residual =
        validated > 0 ? main_run.samples[static_cast<std::size_t>(validated - 1)].defect : 1.0;
    return out;
}

BesselCertificate is_bessel_pair(const expr::WeightExpr& v, const expr::WeightExpr& w,
                                 const expr::ParamBinding& binding, int d, const grid::Grid& g,
                                 double tol) {
    BesselCertificate cert;
    cert.dim = d;
    cert.tol = tol;
    cert.v_text = v.to_string();
    cert.w_text = w.to_string();
    cert.ode = solve_pair_ode(v, w, binding, d, g);

    // Route 2: the pair quadratic form, restricted to the nodes where W
    // evaluates (singular outer endpoints are excluded with their clamp).
    forms::FormOptions opt;
    forms::FormMatrix a = forms::pair_lhs_form(v, binding, d, g, opt);
    int last = find_evaluable_prefix(w, binding, g);
    std::vector<double> wvals(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<double> mvals(static_cast<std::size_t>(g.size()), 0.0);
    for (int i = 0; i < g.size(); ++i) {
        double r = g.node(i);
        double wv = i <= last ? w.evaluate(r, binding) : 0.0;
        wvals[static_cast<std::size_t>(i)] = wv;
        mvals[static_cast<std::size_t>(i)] =
            std::fabs(wv) + v.evaluate(r, binding) / (r * r);
    }
    forms::FormMatrix b = forms::nodal_mass_form(wvals, d - 1, g, opt);
    forms::FormMatrix comparison = forms::nodal_mass_form(mvals, d - 1, g, opt);

    forms::FormMatrix diff = a;
    diff.add_scaled(-1.0, b);

    linalg::GenEigResult eig = linalg::smallest_generalized_eig(diff.matrix(), comparison.matrix());
    cert.form_margin = eig.lambda;
    cert.form_converged = eig.converged;

    if (!eig.converged) {
        cert.verdict = PairVerdict::Inconclusive;
        return cert;
    }
    if (cert.form_margin < -tol) {
        cert.verdict = PairVerdict::NotPair;
        int stride = std::max(1, diff.dofs() / 200);
        for (int i = 0; i < diff.dofs(); i += stride) {
            cert.witness_r.push_back(diff.dof_radius(i));
            cert.witness.push_back(eig.vec[static_cast<std::size_t>(i)]);
        }
        return cert;
    }
    if (cert.ode.ok && cert.ode.all_positive && cert.ode.validated > 0) {
        cert.verdict = PairVerdict::Pair;
    } else {
        cert.verdict = PairVerdict::Inconclusive;
    }
    return cert;
}

std::pair<expr::WeightExpr, int> shift_dimension(const expr::WeightExpr& v,
                                                 const expr::WeightExpr& w1, int n) {
    using expr::WeightExpr;
    WeightExpr r = expr::radial_var();
    WeightExpr r2 = expr::pow_expr(r, WeightExpr::constant(2.0));
    WeightExpr vp = v.derivative();
    WeightExpr nm1 = WeightExpr::constant(static_cast<double>(n - 1));
    WeightExpr nn = WeightExpr::constant(static_cast<double>(n));
    WeightExpr w2 = nm1 * v / r2 - nm1 * (vp / r) + w1 + nn * (vp / r);
    return {w2, n + 2};
}

double ode_defect(const expr::WeightExpr& v, const expr::WeightExpr& w,
                  const expr::ParamBinding& binding, int d, double r, double phi, double dphi,
                  double d2phi) {
    double vv = v.evaluate(r, binding);
    double vp = v.derivative().evaluate(r, binding);
    double ww = w.evaluate(r, binding);
    double t1 = vv * d2phi;
    double t2a = vp * dphi;
    double t2b = (d - 1) * vv * dphi / r;
    double t3 = ww * phi;
    double defect = std::fabs(t1 + t2a + t2b + t3);
    double scale = std::fabs(t1) + std::fabs(t2a) + std::fabs(t2b) + std::fabs(t3);
    return defect / std::max(scale, DBL_MIN);
}

}  // namespace hrlab::pairs
