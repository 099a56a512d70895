#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrlab::grid {

// The interval (0,R) in dimension N; R may be infinite.
struct RadialDomain {
    int dim = 3;
    double radius = std::numeric_limits<double>::infinity();

    RadialDomain() = default;
    RadialDomain(int n, double r);
    bool finite() const { return std::isfinite(radius); }
};

enum class MeshKind { LogUniform, Linear };

const char* mesh_kind_name(MeshKind k);
MeshKind mesh_kind_from_name(const std::string& name);

// Requested discretization; zero/unset fields take documented defaults:
// kind=log-uniform, r_min = 1e-4*min(R,1), r_max = R if finite else 1e4.
struct GridSpec {
    int m = 2048;
    double r_min = 0.0;  // 0 -> default
    double r_max = 0.0;  // 0 -> default
    MeshKind kind = MeshKind::LogUniform;
};

struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Graded radial mesh on [r_min, r_max] with quadrature weights. Nodes are
// uniform in the mesh coordinate s (s = log r for log-uniform meshes) and
// include both truncation bounds; the first and last node carry the
// Dirichlet clamp in the form assembly. Immutable after construction.
class Grid {
public:
    Grid(const RadialDomain& domain, GridSpec spec);

    int size() const { return static_cast<int>(nodes_.size()); }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }
    double quad_weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

    double r_min() const { return nodes_.front(); }
    double r_max() const { return nodes_.back(); }
    MeshKind kind() const { return kind_; }
    const RadialDomain& domain() const { return domain_; }

    // Uniform step of the mesh coordinate.
    double step() const { return h_; }

    // Chain-rule metric factors at node i: dr/ds and d2r/ds2.
    double drds(int i) const;
    double d2rds2(int i) const;

    // Composite quadrature of nodal samples over [r_min, r_max]; exact on
    // integrands constant in the mesh coordinate, fourth order on smooth
    // ones. Throws on non-finite samples.
    double integrate(std::span<const double> f) const;

    GridSpec spec() const { return spec_; }

private:
    RadialDomain domain_;
    GridSpec spec_;
    MeshKind kind_;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

Grid build_grid(const RadialDomain& domain, GridSpec spec = {});

double quad_integral(const Grid& grid, std::span<const double> f);

}  // namespace hrlab::grid
