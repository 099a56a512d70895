#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrlab::linalg {

struct LinalgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric banded matrix stored by diagonals: diag d holds A(i, i+d).
class SymBandMatrix {
public:
    SymBandMatrix() = default;
    SymBandMatrix(int n, int half_bandwidth);

    int size() const { return n_; }
    int half_bandwidth() const { return bw_; }

    double at(int i, int j) const;
    void add(int i, int j, double v);  // accumulates symmetrically; |i-j| <= bw
    void scale(double alpha);
    void add_scaled(double alpha, const SymBandMatrix& other);  // other.bw <= bw

    void apply(std::span<const double> x, std::span<double> y) const;  // y = A x
    double quadratic(std::span<const double> x) const;                 // x^T A x

    // Congruence by a diagonal matrix: A <- diag(s) A diag(s).
    void diag_congruence(std::span<const double> s);

    double inf_norm() const;

private:
    int n_ = 0;
    int bw_ = 0;
    std::vector<double> d_;  // (bw+1) rows of length n
    double& ref(int i, int d) { return d_[static_cast<std::size_t>(d) * n_ + i]; }
    double get(int i, int d) const { return d_[static_cast<std::size_t>(d) * n_ + i]; }
};

// LU factorization with partial pivoting of a banded matrix (kl = ku = bw).
class BandLU {
public:
    // Factors A + shift*B (B optional). Throws LinalgError on exact singularity.
    BandLU(const SymBandMatrix& a, const SymBandMatrix* b, double shift);

    void solve(std::span<double> x) const;  // in place
    int size() const { return n_; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    double& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }
    double get(int i, int j) const {
        return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
    }
};

struct InertiaBreakdown : LinalgError {
    using LinalgError::LinalgError;
};

// Number of eigenvalues of the pencil (A, B) strictly below sigma, via the
// unpivoted LDL^T factorization of A - sigma*B (Sylvester inertia). Throws
// InertiaBreakdown when a pivot collapses; callers perturb sigma and retry.
int inertia_below(const SymBandMatrix& a, const SymBandMatrix& b, double sigma);

// Same count with breakdown handled by nudging sigma upward; sigma is
// updated to the value the count was actually taken at.
int inertia_below_robust(const SymBandMatrix& a, const SymBandMatrix& b, double& sigma,
                         double perturb_scale);

bool is_positive_definite(const SymBandMatrix& b, double shift_rel = 0.0);

struct GenEigOptions {
    double eig_tol = 1e-10;   // residual tolerance on the eigen pair
    int max_iterations = 500;
    double bisect_rel = 1e-13;
};

struct GenEigResult {
    double lambda = 0.0;
    std::vector<double> vec;
    bool converged = false;
    int iterations = 0;
    std::string message;
};

// Smallest eigenvalue of A x = lambda B x with B positive definite.
// Deterministic: inertia bisection brackets lambda_min, then shift-inverted
// power iteration against B refines the pair. Throws LinalgError when B is
// not positive definite.
GenEigResult smallest_generalized_eig(const SymBandMatrix& a, const SymBandMatrix& b,
                                      GenEigOptions opt = {});

}  // namespace hrlab::linalg
