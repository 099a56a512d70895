#include "hrlab/catalog.hpp"

#include <cstdio>

namespace hrlab::catalog {

namespace {

using expr::ParamBinding;
using expr::WeightExpr;

int required_n(const ParamBinding& binding, const std::string& name) {
    auto n = binding.n();
    if (!n) throw CatalogError("catalog '" + name + "': binding is missing N");
    return *n;
}

double required_radius(const ParamBinding& binding, const std::string& name) {
    auto r = binding.radius();
    if (!r || !std::isfinite(*r))
        throw CatalogError("catalog '" + name + "': binding is missing a finite R");
    return *r;
}

double required_b(const ParamBinding& binding, const std::string& name) {
    auto b = binding.b();
    if (!b) throw CatalogError("catalog '" + name + "': binding is missing b");
    return *b;
}

std::string z0_squared_literal() {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", kBesselJ0FirstZero * kBesselJ0FirstZero);
    return buf;
}

}  // namespace

CatalogEntry lookup(const std::string& name, const ParamBinding& binding) {
    const int n = required_n(binding, name);
    const double inf = std::numeric_limits<double>::infinity();

    CatalogEntry e;
    e.name = name;
    e.v = WeightExpr::parse("1");

    if (name == "hardy") {
        e.w = WeightExpr::parse("(N-2)^2/(4*r^2)");
        e.dim = n;
        e.dim_kind = "N";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "hardy_rellich") {
        e.w = WeightExpr::parse("N^2/(4*r^2)");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "hr_ball_boundary") {
        double radius = required_radius(binding, name);
        e.w = WeightExpr::parse("N^2/4 * 1/(r^2*(1-(R/r)^(-N))^2)");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, radius);
    } else if (name == "hr_brezis_vazquez") {
        double radius = required_radius(binding, name);
        e.w = WeightExpr::parse("N^2/(4*r^2) + " + z0_squared_literal() + "/R^2");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, radius);
    } else if (name == "heisenberg2") {
        e.w = WeightExpr::parse("N+2-r^2");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "hydrogen2") {
        e.w = WeightExpr::parse("(N+1)/r - 1");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "ckn_blt1") {
        double b = required_b(binding, name);
        if (!(b < 1.0)) throw CatalogError("catalog 'ckn_blt1': requires b < 1");
        e.w = WeightExpr::parse("(N+1-b)/r^(b+1) - 1/r^(2*b)");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "ckn_bgt1") {
        double b = required_b(binding, name);
        if (!(b > 1.0)) throw CatalogError("catalog 'ckn_bgt1': requires b > 1");
        e.w = WeightExpr::parse("(N+b-1)/r^(b+1) - 1/r^(2*b)");
        e.dim = n + 2;
        e.dim_kind = "N+2";
        e.domain = grid::RadialDomain(n, inf);
    } else if (name == "rellich") {
        // Problem weights for the second-order inequality against |u|^2/r^4;
        // consumed by mode scans, not by first-order pair certification.
        e.w = WeightExpr::parse("N^2*(N-4)^2/(16*r^4)");
        e.dim = n;
        e.dim_kind = "N";
        e.domain = grid::RadialDomain(n, inf);
    } else {
        throw CatalogError("unknown catalog name '" + name + "'");
    }
    return e;
}

std::vector<CatalogInfo> list_entries() {
    return {
        {"hardy", {}, "N", false},
        {"hardy_rellich", {}, "N+2", false},
        {"hr_ball_boundary", {"R"}, "N+2", true},
        {"hr_brezis_vazquez", {"R"}, "N+2", true},
        {"heisenberg2", {}, "N+2", false},
        {"hydrogen2", {}, "N+2", false},
        {"ckn_blt1", {"b"}, "N+2", false},
        {"ckn_bgt1", {"b"}, "N+2", false},
        {"rellich", {}, "N", false},
    };
}

}  // namespace hrlab::catalog
