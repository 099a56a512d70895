#include "hrlab/band_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hrlab::linalg {

SymBandMatrix::SymBandMatrix(int n, int half_bandwidth) : n_(n), bw_(half_bandwidth) {
    if (n < 1 || half_bandwidth < 0) throw LinalgError("band matrix: invalid shape");
    d_.assign(static_cast<std::size_t>(bw_ + 1) * n_, 0.0);
}

double SymBandMatrix::at(int i, int j) const {
    if (i > j) std::swap(i, j);
    int d = j - i;
    if (d > bw_) return 0.0;
    return get(i, d);
}

void SymBandMatrix::add(int i, int j, double v) {
    if (i > j) std::swap(i, j);
    int d = j - i;
    if (d > bw_) throw LinalgError("band matrix: entry outside bandwidth");
    ref(i, d) += v;
}

void SymBandMatrix::scale(double alpha) {
    for (double& x : d_) x *= alpha;
}

void SymBandMatrix::add_scaled(double alpha, const SymBandMatrix& other) {
    if (other.n_ != n_) throw LinalgError("band matrix: size mismatch");
    if (other.bw_ > bw_) throw LinalgError("band matrix: bandwidth mismatch");
    for (int d = 0; d <= other.bw_; ++d)
        for (int i = 0; i + d < n_; ++i) ref(i, d) += alpha * other.get(i, d);
}

void SymBandMatrix::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) y[static_cast<std::size_t>(i)] = get(i, 0) * x[static_cast<std::size_t>(i)];
    for (int d = 1; d <= bw_; ++d) {
        for (int i = 0; i + d < n_; ++i) {
            double v = get(i, d);
            y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(i + d)];
            y[static_cast<std::size_t>(i + d)] += v * x[static_cast<std::size_t>(i)];
        }
    }
}

double SymBandMatrix::quadratic(std::span<const double> x) const {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) acc += get(i, 0) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    for (int d = 1; d <= bw_; ++d)
        for (int i = 0; i + d < n_; ++i)
            acc += 2.0 * get(i, d) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + d)];
    return acc;
}

void SymBandMatrix::diag_congruence(std::span<const double> s) {
    for (int d = 0; d <= bw_; ++d)
        for (int i = 0; i + d < n_; ++i)
            ref(i, d) *= s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i + d)];
}

double SymBandMatrix::inf_norm() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - bw_); j <= std::min(n_ - 1, i + bw_); ++j) row += std::fabs(at(i, j));
        best = std::max(best, row);
    }
    return best;
}

BandLU::BandLU(const SymBandMatrix& a, const SymBandMatrix* b, double shift) {
    n_ = a.size();
    kl_ = a.half_bandwidth();
    if (b) kl_ = std::max(kl_, b->half_bandwidth());
    ku_ = kl_;
    ld_ = 2 * kl_ + ku_ + 1;
    ab_.assign(static_cast<std::size_t>(ld_) * n_, 0.0);
    ipiv_.assign(static_cast<std::size_t>(n_), 0);

    for (int j = 0; j < n_; ++j) {
        int ilo = std::max(0, j - ku_);
        int ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i) {
            double v = a.at(i, j);
            if (b) v += shift * b->at(i, j);
            at(i, j) = v;
        }
    }

    const int kv = kl_ + ku_;  // working upper bandwidth after pivoting
    for (int j = 0; j < n_; ++j) {
        int km = std::min(kl_, n_ - 1 - j);
        int jp = 0;
        double best = std::fabs(get(j, j));
        for (int p = 1; p <= km; ++p) {
            double v = std::fabs(get(j + p, j));
            if (v > best) {
                best = v;
                jp = p;
            }
        }
        ipiv_[static_cast<std::size_t>(j)] = j + jp;
        if (best == 0.0) throw LinalgError("band LU: exactly singular matrix");
        if (jp != 0) {
            int cmax = std::min(n_ - 1, j + kv);
            for (int c = j; c <= cmax; ++c) std::swap(at(j, c), at(j + jp, c));
        }
        double piv = get(j, j);
        for (int p = 1; p <= km; ++p) at(j + p, j) /= piv;
        int cmax = std::min(n_ - 1, j + kv);
        for (int c = j + 1; c <= cmax; ++c) {
            double ujc = get(j, c);
            if (ujc == 0.0) continue;
            for (int p = 1; p <= km; ++p) at(j + p, c) -= get(j + p, j) * ujc;
        }
    }
}

void BandLU::solve(std::span<double> x) const {
    const int kv = kl_ + ku_;
    for (int j = 0; j < n_ - 1; ++j) {
        int jp = ipiv_[static_cast<std::size_t>(j)];
        if (jp != j) std::swap(x[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(jp)]);
        int km = std::min(kl_, n_ - 1 - j);
        double xj = x[static_cast<std::size_t>(j)];
        for (int p = 1; p <= km; ++p) x[static_cast<std::size_t>(j + p)] -= get(j + p, j) * xj;
    }
    for (int j = n_ - 1; j >= 0; --j) {
        double xj = x[static_cast<std::size_t>(j)] / get(j, j);
        x[static_cast<std::size_t>(j)] = xj;
        int ilo = std::max(0, j - kv);
        for (int i = ilo; i < j; ++i) x[static_cast<std::size_t>(i)] -= get(i, j) * xj;
    }
}

namespace {

// Unpivoted banded LDL^T pivot scan of A - sigma*B; returns the number of
// negative pivots. Breakdown on collapsing pivots is signalled to the caller.
int ldlt_negative_pivots(const SymBandMatrix& a, const SymBandMatrix& b, double sigma) {
    const int n = a.size();
    const int bw = std::max(a.half_bandwidth(), b.half_bandwidth());
    // lower-band working copy: w[d][i] = M(i+d, i)
    std::vector<std::vector<double>> w(static_cast<std::size_t>(bw) + 1,
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int d = 0; d <= bw; ++d)
        for (int i = 0; i + d < n; ++i)
            w[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] =
                a.at(i + d, i) - sigma * b.at(i + d, i);

    int negatives = 0;
    std::vector<double> col(static_cast<std::size_t>(bw) + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        double dj = w[0][static_cast<std::size_t>(j)];
        double colscale = std::fabs(dj);
        int km = std::min(bw, n - 1 - j);
        for (int p = 1; p <= km; ++p)
            colscale = std::max(colscale, std::fabs(w[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)]));
        if (!(std::fabs(dj) > 1e-280) || !(std::fabs(dj) > 1e-18 * colscale))
            throw InertiaBreakdown("inertia: pivot collapse");
        if (dj < 0.0) negatives++;
        for (int p = 1; p <= km; ++p)
            col[static_cast<std::size_t>(p)] = w[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] / dj;
        for (int p = 1; p <= km; ++p) {
            double lp = col[static_cast<std::size_t>(p)];
            if (lp == 0.0) continue;
            for (int q = p; q <= km; ++q) {
                // M(j+q, j+p) -= l_q * d * l_p
                w[static_cast<std::size_t>(q - p)][static_cast<std::size_t>(j + p)] -=
                    col[static_cast<std::size_t>(q)] * dj * lp;
            }
        }
    }
    return negatives;
}

double pencil_rayleigh(const SymBandMatrix& a, const SymBandMatrix& b, std::span<const double> x) {
    return a.quadratic(x) / b.quadratic(x);
}

}  // namespace

int inertia_below(const SymBandMatrix& a, const SymBandMatrix& b, double sigma) {
    return ldlt_negative_pivots(a, b, sigma);
}

int inertia_below_robust(const SymBandMatrix& a, const SymBandMatrix& b, double& sigma,
                         double perturb_scale) {
    double delta = std::max(perturb_scale, 1e-30);
    for (int attempt = 0; attempt < 40; ++attempt) {
        try {
            return ldlt_negative_pivots(a, b, sigma);
        } catch (const InertiaBreakdown&) {
            sigma += delta;
            delta *= 2.0;
        }
    }
    throw LinalgError("inertia: persistent pivot collapse");
}

bool is_positive_definite(const SymBandMatrix& b, double shift_rel) {
    double shift = -shift_rel * std::max(b.inf_norm(), 1e-300);
    SymBandMatrix ident(b.size(), 0);
    for (int i = 0; i < b.size(); ++i) ident.add(i, i, 1.0);
    try {
        return inertia_below(b, ident, shift) == 0;
    } catch (const InertiaBreakdown&) {
        return false;
    }
}

GenEigResult smallest_generalized_eig(const SymBandMatrix& a_in, const SymBandMatrix& b_in,
                                      GenEigOptions opt) {
    const int n = a_in.size();
    if (b_in.size() != n) throw LinalgError("pencil: size mismatch");

    // Diagonal congruence scaling tames the dynamic range of power weights
    // over wide log windows; eigenvalues are unchanged.
    std::vector<double> s(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        double m = std::max(std::fabs(a_in.at(i, i)), std::fabs(b_in.at(i, i)));
        s[static_cast<std::size_t>(i)] = m > 0 ? 1.0 / std::sqrt(m) : 1.0;
    }
    SymBandMatrix a = a_in;
    SymBandMatrix b = b_in;
    a.diag_congruence(s);
    b.diag_congruence(s);

    if (!is_positive_definite(b, 0.0))
        throw LinalgError("pencil: right-hand form is not positive definite");

    GenEigResult out;

    // Deterministic probe gives an upper bound for the smallest eigenvalue.
    std::vector<double> x(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = std::sin(pi * (i + 1.0) / (n + 1.0));
    double hi = pencil_rayleigh(a, b, x);
    double span0 = std::max({1.0, std::fabs(hi)});
    double probe = span0;
    hi += 1e-8 * span0;  // strictly above lambda_min
    double lo = hi;
    bool bracketed = false;
    for (int attempt = 0; attempt < 200; ++attempt) {
        lo = hi - probe;
        double sigma = lo;
        if (inertia_below_robust(a, b, sigma, 1e-10 * probe) == 0) {
            lo = std::min(sigma, lo);
            bracketed = true;
            break;
        }
        probe *= 4.0;
    }
    if (!bracketed) throw LinalgError("pencil: failed to bracket the smallest eigenvalue");

    for (int iter = 0; iter < 260; ++iter) {
        double width = hi - lo;
        if (width <= opt.bisect_rel * std::max({std::fabs(lo), std::fabs(hi), 1e-3}))
            break;
        double mid = 0.5 * (lo + hi);
        double sigma = mid;
        int cnt = inertia_below_robust(a, b, sigma, 1e-6 * width);
        // sigma may have been nudged upward by breakdown recovery; update the
        // bracket with the value the count was actually taken at.
        if (cnt == 0)
            lo = std::max(lo, sigma);
        else
            hi = std::min(hi, sigma);
        if (lo >= hi) break;
    }

    if (lo > hi) hi = lo;

    // Shift strictly below lambda_min, then inverse iteration on (A - mu B).
    double width = std::max(hi - lo, 1e-300);
    double mu = lo - std::max(16.0 * width, 1e-12 * std::max(std::fabs(lo), 1.0));
    BandLU lu(a, &b, -mu);

    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = std::sin(pi * (i + 1.0) / (n + 1.0));
    std::vector<double> bx(static_cast<std::size_t>(n)), ax(static_cast<std::size_t>(n));
    double rho = 0.0;
    bool ok = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        b.apply(x, bx);
        lu.solve(bx);
        double norm = 0.0;
        for (double v : bx) norm = std::max(norm, std::fabs(v));
        if (!(norm > 0.0)) throw LinalgError("pencil: inverse iteration collapsed");
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = bx[static_cast<std::size_t>(i)] / norm;

        rho = pencil_rayleigh(a, b, x);
        a.apply(x, ax);
        b.apply(x, bx);
        double rnum = 0.0, rden = 0.0;
        for (int i = 0; i < n; ++i) {
            double res = ax[static_cast<std::size_t>(i)] - rho * bx[static_cast<std::size_t>(i)];
            rnum += res * res;
            rden += ax[static_cast<std::size_t>(i)] * ax[static_cast<std::size_t>(i)] +
                    rho * rho * bx[static_cast<std::size_t>(i)] * bx[static_cast<std::size_t>(i)];
        }
        if (std::sqrt(rnum) <= opt.eig_tol * std::sqrt(std::max(rden, 1e-300)) + 1e-300) {
            ok = true;
            ++it;
            break;
        }
    }

    out.lambda = rho;
    out.iterations = it;
    out.converged = ok && rho <= hi + 1e3 * width + 1e-9 * std::max(std::fabs(hi), 1.0);
    if (!out.converged)
        out.message = ok ? "eigenvalue drifted outside the bisection bracket"
                         : "inverse iteration did not reach the residual tolerance";

    // Undo scaling; normalize deterministically (largest entry positive).
    out.vec.resize(static_cast<std::size_t>(n));
    int imax = 0;
    double vmax = 0.0;
    for (int i = 0; i < n; ++i) {
        out.vec[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        double av = std::fabs(out.vec[static_cast<std::size_t>(i)]);
        if (av > vmax) {
            vmax = av;
            imax = i;
        }
    }
    if (vmax > 0.0) {
        double sign = out.vec[static_cast<std::size_t>(imax)] > 0 ? 1.0 : -1.0;
        for (double& v : out.vec) v = v * sign / vmax;
    }
    return out;
}

}  // namespace hrlab::linalg
