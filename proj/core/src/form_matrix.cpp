#include "hrlab/form_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hrlab::forms {

std::int64_t mode_coeff(int k, int n) {
    if (k < 0) throw FormError("mode_coeff: k must be >= 0");
    if (n < 1) throw FormError("mode_coeff: N must be >= 1");
    return static_cast<std::int64_t>(k) * (n + k - 2);
}

namespace {

struct StencilRow {
    int first = 0;                 // global node index of the first coefficient
    std::vector<double> coeff;     // in the mesh coordinate, excluding 1/h powers
};

// Derivative rows in the uniform mesh coordinate at global node i. Rows may
// reference nodes outside [0, M-1]; clamped assembly drops those columns
// (zero extension). FreeInner uses one-sided rows near the inner end.
StencilRow d1_row(int i, int m, int fd_order, Boundary boundary) {
    StencilRow row;
    if (fd_order == 2) {
        if (boundary == Boundary::FreeInner && i == 0) {
            row.first = 0;
            row.coeff = {-1.5, 2.0, -0.5};
        } else {
            row.first = i - 1;
            row.coeff = {-0.5, 0.0, 0.5};
        }
        return row;
    }
    if (boundary == Boundary::FreeInner && i == 0) {
        row.first = 0;
        row.coeff = {-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12};
    } else if (boundary == Boundary::FreeInner && i == 1) {
        row.first = 0;
        row.coeff = {-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12};
    } else {
        row.first = i - 2;
        row.coeff = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    }
    (void)m;
    return row;
}

StencilRow d2_row(int i, int fd_order) {
    StencilRow row;
    if (fd_order == 2) {
        row.first = i - 1;
        row.coeff = {1.0, -2.0, 1.0};
        return row;
    }
    row.first = i - 2;
    row.coeff = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    return row;
}

}  // namespace

std::vector<double> FormMatrix::sample(const std::function<double(double)>& f) const {
    std::vector<double> out(radii_.size());
    for (std::size_t i = 0; i < radii_.size(); ++i) out[i] = f(radii_[i]);
    return out;
}

void FormMatrix::add_scaled(double alpha, const FormMatrix& other) {
    if (other.dofs() != dofs() || other.dof0_ != dof0_)
        throw FormError("form combine: incompatible layouts");
    if (other.mat_.half_bandwidth() > mat_.half_bandwidth()) {
        // widen in place
        linalg::SymBandMatrix wider(mat_.size(), other.mat_.half_bandwidth());
        wider.add_scaled(1.0, mat_);
        mat_ = std::move(wider);
    }
    mat_.add_scaled(alpha, other.mat_);
    order_ = std::max(order_, other.order_);
}

std::string FormMatrix::banded_dump() const {
    std::string out;
    char buf[64];
    for (int d = 0; d <= mat_.half_bandwidth(); ++d) {
        std::snprintf(buf, sizeof(buf), "diag %d:", d);
        out += buf;
        for (int i = 0; i + d < mat_.size(); ++i) {
            std::snprintf(buf, sizeof(buf), " %.9g", mat_.at(i, i + d));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

FormMatrix make_form(const grid::Grid& g, FormOptions opt, int order,
                     std::span<const double> node_factors) {
    if (order < 0 || order > 2) throw FormError("form assembly: derivative order must be 0, 1, 2");
    if (opt.fd_order != 2 && opt.fd_order != 4)
        throw FormError("form assembly: finite-difference order must be 2 or 4");
    if (opt.boundary == Boundary::FreeInner && order == 2)
        throw FormError("form assembly: second-order terms require clamped ends");

    const int m = g.size();
    if (static_cast<int>(node_factors.size()) != m)
        throw FormError("form assembly: node factor count does not match the grid");

    const int dof0 = opt.boundary == Boundary::FreeInner ? 0 : 1;
    const int ndof = opt.boundary == Boundary::FreeInner ? m - 1 : m - 2;
    if (ndof < 4) throw FormError("form assembly: too few interior nodes");

    const double h = g.step();
    const int half = opt.fd_order == 2 ? 1 : 2;
    const int bw = order == 0 ? 0 : (opt.boundary == Boundary::FreeInner ? 4 : 2 * half);

    FormMatrix out;
    out.dof0_ = dof0;
    out.order_ = order;
    out.boundary_ = opt.boundary;
    out.mat_ = linalg::SymBandMatrix(ndof, bw);
    out.radii_.resize(static_cast<std::size_t>(ndof));
    for (int i = 0; i < ndof; ++i) out.radii_[static_cast<std::size_t>(i)] = g.node(dof0 + i);

    std::vector<double> row(static_cast<std::size_t>(2 * 4 + 1), 0.0);
    for (int q = 0; q < ndof; ++q) {
        const int node = dof0 + q;
        const double lam = node_factors[static_cast<std::size_t>(node)];
        if (lam == 0.0) continue;
        if (!std::isfinite(lam)) throw FormError("form assembly: non-finite weight sample");

        if (order == 0) {
            out.mat_.add(q, q, lam);
            continue;
        }

        // Build the derivative row for u^(order)(r) at this node in terms of
        // nodal values, including chain-rule metric factors.
        const double rs = g.drds(node);
        const double rss = g.d2rds2(node);

        StencilRow s1 = d1_row(node, m, opt.fd_order, opt.boundary);
        StencilRow srow;
        if (order == 1) {
            srow = s1;
            for (double& cval : srow.coeff) cval /= (h * rs);
        } else {
            StencilRow s2 = d2_row(node, opt.fd_order);
            // u'' = v_ss / rs^2 - v_s * rss / rs^3
            int first = std::min(s1.first, s2.first);
            int last = std::max(s1.first + static_cast<int>(s1.coeff.size()),
                                s2.first + static_cast<int>(s2.coeff.size()));
            srow.first = first;
            srow.coeff.assign(static_cast<std::size_t>(last - first), 0.0);
            for (std::size_t p = 0; p < s2.coeff.size(); ++p)
                srow.coeff[static_cast<std::size_t>(s2.first - first) + p] +=
                    s2.coeff[p] / (h * h * rs * rs);
            for (std::size_t p = 0; p < s1.coeff.size(); ++p)
                srow.coeff[static_cast<std::size_t>(s1.first - first) + p] -=
                    s1.coeff[p] * rss / (h * rs * rs * rs);
        }

        // Drop columns outside the DOF range (zero extension / clamping).
        const int len = static_cast<int>(srow.coeff.size());
        for (int p1 = 0; p1 < len; ++p1) {
            int j1 = srow.first + p1 - dof0;
            if (j1 < 0 || j1 >= ndof) continue;
            double c1 = srow.coeff[static_cast<std::size_t>(p1)];
            if (c1 == 0.0) continue;
            out.mat_.add(j1, j1, lam * c1 * c1);
            for (int p2 = p1 + 1; p2 < len; ++p2) {
                int j2 = srow.first + p2 - dof0;
                if (j2 < 0 || j2 >= ndof) continue;
                double c2 = srow.coeff[static_cast<std::size_t>(p2)];
                if (c2 == 0.0) continue;
                out.mat_.add(j1, j2, lam * c1 * c2);
            }
        }
    }
    return out;
}

std::vector<double> weight_samples(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                   double r_exponent, const grid::Grid& g) {
    std::vector<double> out(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        double r = g.node(i);
        double wv;
        try {
            wv = w.evaluate(r, binding);
        } catch (const expr::EvalError& e) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "weight evaluation failed at r=%.6g: %s", r, e.what());
            throw FormError(buf);
        }
        out[static_cast<std::size_t>(i)] = wv * std::pow(r, r_exponent);
    }
    return out;
}

namespace {

// Mesh-coordinate quadrature factor for the form sum: plain trapezoid with
// zero-extended integrand; half weight at a free inner end node.
double form_qw(const grid::Grid& g, int node, Boundary boundary) {
    double qw = g.step() * g.drds(node);
    if (boundary == Boundary::FreeInner && node == 0) qw *= 0.5;
    return qw;
}

FormMatrix assemble_from_samples(std::vector<double> samples, int order, const grid::Grid& g,
                                 FormOptions opt) {
    for (int i = 0; i < g.size(); ++i)
        samples[static_cast<std::size_t>(i)] *= form_qw(g, i, opt.boundary);
    return make_form(g, opt, order, samples);
}

}  // namespace

FormMatrix assemble_weighted_form(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                  int r_power, int order, int n, const grid::Grid& g,
                                  FormOptions opt) {
    auto samples = weight_samples(w, binding, static_cast<double>(n - 1 + r_power), g);
    return assemble_from_samples(std::move(samples), order, g, opt);
}

FormMatrix hr_lhs_form(const expr::WeightExpr& v, const expr::ParamBinding& binding, int n, int k,
                       const grid::Grid& g, FormOptions opt) {
    const double ck = static_cast<double>(mode_coeff(k, n));
    expr::WeightExpr dv = v.derivative();
    expr::WeightExpr d2v = dv.derivative();

    FormMatrix a = assemble_weighted_form(v, binding, 0, 2, n, g, opt);
    FormMatrix t;
    t = assemble_weighted_form(v, binding, -2, 1, n, g, opt);
    a.add_scaled(static_cast<double>(n - 1) + 2.0 * ck, t);
    t = assemble_weighted_form(v, binding, -4, 0, n, g, opt);
    a.add_scaled(ck * ck + 2.0 * (n - 4) * ck, t);
    t = assemble_weighted_form(dv, binding, -1, 1, n, g, opt);
    a.add_scaled(-static_cast<double>(n - 1), t);
    t = assemble_weighted_form(dv, binding, -3, 0, n, g, opt);
    a.add_scaled(-static_cast<double>(n - 5) * ck, t);
    t = assemble_weighted_form(d2v, binding, -2, 0, n, g, opt);
    a.add_scaled(-ck, t);
    return a;
}

FormMatrix hr_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int n, int k,
                       const grid::Grid& g, FormOptions opt) {
    const double ck = static_cast<double>(mode_coeff(k, n));
    FormMatrix b = assemble_weighted_form(w, binding, 0, 1, n, g, opt);
    if (ck != 0.0) {
        FormMatrix t = assemble_weighted_form(w, binding, -2, 0, n, g, opt);
        b.add_scaled(ck, t);
    }
    return b;
}

FormMatrix rellich_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int n,
                            const grid::Grid& g, FormOptions opt) {
    return assemble_weighted_form(w, binding, 0, 0, n, g, opt);
}

FormMatrix pair_lhs_form(const expr::WeightExpr& v, const expr::ParamBinding& binding, int d,
                         const grid::Grid& g, FormOptions opt) {
    return assemble_weighted_form(v, binding, 0, 1, d, g, opt);
}

FormMatrix pair_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int d,
                         const grid::Grid& g, FormOptions opt) {
    return assemble_weighted_form(w, binding, 0, 0, d, g, opt);
}

FormMatrix mass_form(int r_exponent, const grid::Grid& g, FormOptions opt) {
    std::vector<double> samples(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i)
        samples[static_cast<std::size_t>(i)] = std::pow(g.node(i), r_exponent);
    return assemble_from_samples(std::move(samples), 0, g, opt);
}

FormMatrix nodal_mass_form(std::span<const double> node_values, int r_exponent,
                           const grid::Grid& g, FormOptions opt) {
    if (static_cast<int>(node_values.size()) != g.size())
        throw FormError("nodal mass: sample count does not match the grid");
    std::vector<double> samples(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i)
        samples[static_cast<std::size_t>(i)] =
            node_values[static_cast<std::size_t>(i)] * std::pow(g.node(i), r_exponent);
    return assemble_from_samples(std::move(samples), 0, g, opt);
}

}  // namespace hrlab::forms
