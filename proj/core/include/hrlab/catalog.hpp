#pragma once

#include <string>
#include <vector>

#include "hrlab/radial_grid.hpp"
#include "hrlab/weight_expr.hpp"

namespace hrlab::catalog {

// First positive zero of the Bessel function J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

struct CatalogError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CatalogEntry {
    std::string name;
    expr::WeightExpr v;
    expr::WeightExpr w;
    int dim = 0;             // resolved Bessel dimension (N or N+2)
    std::string dim_kind;    // "N" or "N+2"
    grid::RadialDomain domain;
};

struct CatalogInfo {
    std::string name;
    std::vector<std::string> required;  // parameters beyond N
    std::string dim_kind;
    bool finite_domain = false;
};

// Names: hardy, hardy_rellich, hr_ball_boundary, hr_brezis_vazquez,
// heisenberg2, hydrogen2, ckn_blt1, ckn_bgt1, rellich.
// Throws CatalogError on unknown names or missing parameters
// (R for ball entries, b for the CKN entries).
CatalogEntry lookup(const std::string& name, const expr::ParamBinding& binding);

std::vector<CatalogInfo> list_entries();

}  // namespace hrlab::catalog
