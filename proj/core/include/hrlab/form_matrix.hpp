#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hrlab/band_matrix.hpp"
#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::forms {

struct FormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Laplace-Beltrami eigenvalue c_k = k(N+k-2), exact in integer arithmetic.
std::int64_t mode_coeff(int k, int n);

// ClampedBoth zero-extends profiles beyond both truncation ends (u = 0 there,
// and effectively u' = 0 for second-order stencils), the discrete proxy for
// compactly supported test functions. FreeInner leaves the inner end
// unconstrained (one-sided stencils), for problems posed on the whole ball.
enum class Boundary { ClampedBoth, FreeInner };

struct FormOptions {
    Boundary boundary = Boundary::ClampedBoth;
    int fd_order = 4;  // 2 or 4
};

// Discretized quadratic form sum_i qw_i * weight(r_i) * r_i^expo * |u^(m)(r_i)|^2
// over profile degrees of freedom, stored banded symmetric. Derivatives are
// taken in the mesh coordinate with exact chain-rule factors, so power-weight
// problems keep their scale invariance to rounding.
class FormMatrix {
public:
    FormMatrix() = default;

    const linalg::SymBandMatrix& matrix() const { return mat_; }
    linalg::SymBandMatrix& matrix() { return mat_; }

    int dofs() const { return mat_.size(); }
    int node_of_dof(int i) const { return dof0_ + i; }
    double dof_radius(int i) const { return radii_[static_cast<std::size_t>(i)]; }
    std::span<const double> dof_radii() const { return radii_; }

    int deriv_order() const { return order_; }
    Boundary boundary() const { return boundary_; }

    double quadratic(std::span<const double> u) const { return mat_.quadratic(u); }

    // Samples a radial function at the DOF nodes.
    std::vector<double> sample(const std::function<double(double)>& f) const;

    void add_scaled(double alpha, const FormMatrix& other);

    // Debug export: one line per stored diagonal.
    std::string banded_dump() const;

    friend FormMatrix make_form(const grid::Grid& g, FormOptions opt, int order,
                                std::span<const double> node_factors);

private:
    linalg::SymBandMatrix mat_;
    std::vector<double> radii_;
    int dof0_ = 1;
    int order_ = 0;
    Boundary boundary_ = Boundary::ClampedBoth;
};

// Core assembly: node_factors holds the full per-node measure
// (quadrature weight in the mesh coordinate x weight(r) x power of r).
FormMatrix make_form(const grid::Grid& g, FormOptions opt, int order,
                     std::span<const double> node_factors);

// sum_i qw_i * w(r_i) * r_i^{N-1+r_power} * |u^(order)|^2
FormMatrix assemble_weighted_form(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                  int r_power, int order, int n, const grid::Grid& g,
                                  FormOptions opt = {});

// The three problem families of the decomposition, per mode k.
FormMatrix hr_lhs_form(const expr::WeightExpr& v, const expr::ParamBinding& binding, int n, int k,
                       const grid::Grid& g, FormOptions opt = {});
FormMatrix hr_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int n, int k,
                       const grid::Grid& g, FormOptions opt = {});
FormMatrix rellich_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int n,
                            const grid::Grid& g, FormOptions opt = {});

// First-order pair forms in Bessel dimension d: int V r^{d-1}|u'|^2 and
// int W r^{d-1}|u|^2.
FormMatrix pair_lhs_form(const expr::WeightExpr& v, const expr::ParamBinding& binding, int d,
                         const grid::Grid& g, FormOptions opt = {});
FormMatrix pair_rhs_form(const expr::WeightExpr& w, const expr::ParamBinding& binding, int d,
                         const grid::Grid& g, FormOptions opt = {});

// int r^expo |u|^2 (diagonal).
FormMatrix mass_form(int r_exponent, const grid::Grid& g, FormOptions opt = {});

// Diagonal mass with arbitrary positive nodal values times r^expo.
FormMatrix nodal_mass_form(std::span<const double> node_values, int r_exponent,
                           const grid::Grid& g, FormOptions opt = {});

// Nodal weight samples w(r_i) * r_i^expo with evaluation errors wrapped
// into FormError.
std::vector<double> weight_samples(const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                   double r_exponent, const grid::Grid& g);

}  // namespace hrlab::forms
