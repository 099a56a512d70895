#include "hrlab/decompose_check.hpp"

#include <algorithm>
#include <cmath>

namespace hrlab::forms {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 5-point Gauss-Legendre on [-1, 1].
const double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                       0.9061798459386640};
const double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                       0.4786286704993665, 0.2369268850561891};

// Zonal spherical harmonics on S^2, orthonormal: Y_k(x), x = cos theta.
double zonal(int k, double x) {
    switch (k) {
        case 0: return std::sqrt(1.0 / (4.0 * kPi));
        case 1: return std::sqrt(3.0 / (4.0 * kPi)) * x;
        case 2: return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * x * x - 1.0);
        default: break;
    }
    throw FormError("decompose_check: modes are limited to k = 0, 1, 2");
}

// d/d theta Y_k expressed through x = cos theta: dY/dtheta = -sin(theta) dY/dx.
double zonal_dtheta(int k, double x, double sin_theta) {
    switch (k) {
        case 0: return 0.0;
        case 1: return -sin_theta * std::sqrt(3.0 / (4.0 * kPi));
        case 2: return -sin_theta * std::sqrt(5.0 / (16.0 * kPi)) * 6.0 * x;
        default: break;
    }
    throw FormError("decompose_check: modes are limited to k = 0, 1, 2");
}

}  // namespace

RadialProfile bump_profile(int k, double a, double b) {
    if (!(0 < a && a < b)) throw FormError("bump_profile: need 0 < a < b");
    double mid = 0.5 * (a + b);
    double peak = std::pow(mid - a, 3) * std::pow(b - mid, 3);
    RadialProfile p;
    p.k = k;
    p.support_lo = a;
    p.support_hi = b;
    p.f = [a, b, peak](double r) {
        if (r <= a || r >= b) return 0.0;
        return std::pow(r - a, 3) * std::pow(b - r, 3) / peak;
    };
    p.df = [a, b, peak](double r) {
        if (r <= a || r >= b) return 0.0;
        double u = r - a, v = b - r;
        return (3.0 * u * u * v * v * v - 3.0 * u * u * u * v * v) / peak;
    };
    p.d2f = [a, b, peak](double r) {
        if (r <= a || r >= b) return 0.0;
        double u = r - a, v = b - r;
        return (6.0 * u * v * v * v - 18.0 * u * u * v * v + 6.0 * u * u * u * v) / peak;
    };
    return p;
}

DecomposeResult decompose_check(const std::vector<RadialProfile>& profiles,
                                const expr::WeightExpr& w, const expr::ParamBinding& binding,
                                const grid::Grid& g) {
    const int n = 3;  // validation dimension
    if (profiles.empty() || profiles.size() > 3)
        throw FormError("decompose_check: provide between one and three mode profiles");
    double lo = 1e300, hi = 0.0;
    for (const RadialProfile& p : profiles) {
        if (p.k < 0 || p.k > 2) throw FormError("decompose_check: modes are limited to k = 0, 1, 2");
        if (!(p.support_lo > g.r_min() && p.support_hi < g.r_max()))
            throw FormError("decompose_check: profile support must lie inside (r_min, r_max)");
        lo = std::min(lo, p.support_lo);
        hi = std::max(hi, p.support_hi);
    }

    // 3-D side: 2-pi * int int [.] r^2 dr dx over the supported annulus.
    const int panels = 400;
    const int ntheta = 48;
    std::vector<double> xg(ntheta), xw(ntheta);
    {
        // Gauss-Legendre nodes on [-1,1] by Newton on Legendre polynomials
        for (int i = 0; i < ntheta; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (ntheta + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= ntheta; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = ntheta * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= ntheta; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = ntheta * (x * p1 - p0) / (x * x - 1.0);
            xg[static_cast<std::size_t>(i)] = x;
            xw[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    double lhs3 = 0.0, rhs3 = 0.0;
    const double dr = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        double r0 = lo + p * dr;
        for (int q = 0; q < 5; ++q) {
            double r = r0 + 0.5 * dr * (1.0 + kGx[q]);
            double wr = 0.5 * dr * kGw[q];
            double wval = w.evaluate(r, binding);
            for (int ix = 0; ix < ntheta; ++ix) {
                double x = xg[static_cast<std::size_t>(ix)];
                double sin_theta = std::sqrt(std::max(0.0, 1.0 - x * x));
                double du_dr = 0.0, du_dth = 0.0, lap = 0.0;
                for (const RadialProfile& prof : profiles) {
                    double yk = zonal(prof.k, x);
                    double f = prof.f(r), d1 = prof.df(r), d2 = prof.d2f(r);
                    double ck = static_cast<double>(mode_coeff(prof.k, n));
                    du_dr += d1 * yk;
                    du_dth += f * zonal_dtheta(prof.k, x, sin_theta);
                    lap += (d2 + (n - 1) / r * d1 - ck / (r * r) * f) * yk;
                }
                double grad2 = du_dr * du_dr + du_dth * du_dth / (r * r);
                double meas = 2.0 * kPi * wr * xw[static_cast<std::size_t>(ix)] * r * r;
                lhs3 += lap * lap * meas;
                rhs3 += wval * grad2 * meas;
            }
        }
    }

    // 1-D side: sums of the assembled mode forms evaluated on the sampled
    // profiles.
    expr::WeightExpr one = expr::WeightExpr::constant(1.0);
    double lhsm = 0.0, rhsm = 0.0;
    for (const RadialProfile& prof : profiles) {
        FormMatrix a = hr_lhs_form(one, binding, n, prof.k, g);
        FormMatrix b = hr_rhs_form(w, binding, n, prof.k, g);
        std::vector<double> u = a.sample(prof.f);
        lhsm += a.quadratic(u);
        rhsm += b.quadratic(u);
    }

    DecomposeResult out;
    out.lhs_3d = lhs3;
    out.lhs_modes = lhsm;
    out.rhs_3d = rhs3;
    out.rhs_modes = rhsm;
    double d1 = std::fabs(lhs3 - lhsm) / std::max(std::fabs(lhs3), 1e-300);
    double d2 = std::fabs(rhs3 - rhsm) / std::max(std::fabs(rhs3), 1e-300);
    out.residual = std::max(d1, d2);
    return out;
}

}  // namespace hrlab::forms
