#include "hrlab/radial_grid.hpp"

#include <algorithm>
#include <cmath>

namespace hrlab::grid {

RadialDomain::RadialDomain(int n, double r) : dim(n), radius(r) {
    if (n < 1) throw GridError("domain: dimension N must be an integer >= 1");
    if (!(r > 0.0)) throw GridError("domain: radius must be positive (or infinite)");
}

const char* mesh_kind_name(MeshKind k) {
    return k == MeshKind::LogUniform ? "log" : "linear";
}

MeshKind mesh_kind_from_name(const std::string& name) {
    if (name == "log") return MeshKind::LogUniform;
    if (name == "linear") return MeshKind::Linear;
    throw GridError("unknown mesh kind '" + name + "' (expected log|linear)");
}

Grid::Grid(const RadialDomain& domain, GridSpec spec) : domain_(domain), kind_(spec.kind) {
    if (spec.r_min == 0.0) spec.r_min = 1e-4 * std::min(domain.radius, 1.0);
    if (spec.r_max == 0.0) spec.r_max = domain.finite() ? domain.radius : 1e4;
    if (spec.m < 16) throw GridError("grid: node count M must be >= 16");
    if (!(spec.r_min > 0.0) || !(spec.r_min < spec.r_max))
        throw GridError("grid: need 0 < r_min < r_max");
    if (domain.finite() && spec.r_max > domain.radius * (1.0 + 1e-12))
        throw GridError("grid: r_max exceeds the domain radius");
    spec_ = spec;

    const int m = spec.m;
    nodes_.resize(static_cast<std::size_t>(m));
    weights_.resize(static_cast<std::size_t>(m));

    if (kind_ == MeshKind::LogUniform) {
        const double t0 = std::log(spec.r_min);
        const double t1 = std::log(spec.r_max);
        h_ = (t1 - t0) / (m - 1);
        for (int i = 0; i < m; ++i) nodes_[static_cast<std::size_t>(i)] = std::exp(t0 + h_ * i);
    } else {
        h_ = (spec.r_max - spec.r_min) / (m - 1);
        for (int i = 0; i < m; ++i) nodes_[static_cast<std::size_t>(i)] = spec.r_min + h_ * i;
    }
    nodes_.front() = spec.r_min;
    nodes_.back() = spec.r_max;

    // Trapezoid weights with the order-4 Gregory end correction; all positive,
    // sum h*(M-1) in the mesh coordinate.
    static const double kEnd[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int i = 0; i < m; ++i) {
        double c = 1.0;
        if (i < 3) c = kEnd[i];
        if (i >= m - 3) c = kEnd[m - 1 - i];
        weights_[static_cast<std::size_t>(i)] = h_ * c * drds(i);
    }
}

double Grid::drds(int i) const {
    return kind_ == MeshKind::LogUniform ? nodes_[static_cast<std::size_t>(i)] : 1.0;
}

double Grid::d2rds2(int i) const {
    return kind_ == MeshKind::LogUniform ? nodes_[static_cast<std::size_t>(i)] : 0.0;
}

double Grid::integrate(std::span<const double> f) const {
    if (static_cast<int>(f.size()) != size())
        throw GridError("quad_integral: sample count does not match the grid");
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) {
        double v = f[static_cast<std::size_t>(i)];
        if (!std::isfinite(v)) throw GridError("quad_integral: non-finite sample");
        acc += weights_[static_cast<std::size_t>(i)] * v;
    }
    return acc;
}

Grid build_grid(const RadialDomain& domain, GridSpec spec) { return Grid(domain, spec); }

double quad_integral(const Grid& grid, std::span<const double> f) { return grid.integrate(f); }

}  // namespace hrlab::grid
