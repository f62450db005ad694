#pragma once

#include <spectrafw/core.hpp>

#include <functional>
#include <memory>

namespace spectrafw {

/// Eigenpairs with values sorted in descending order (lambda_1 >= ... ),
/// vectors stored column-wise in the same order.
struct EigPairs {
    Vector values;
    Matrix vectors;

    Index size() const { return values.size(); }
};

/// Matrix-free symmetric operator x -> M x.
class SymMatVec {
  public:
    using ApplyFn = std::function<void(const Vector &x, Vector &y)>;

    SymMatVec(Index dim, ApplyFn apply) : dim_(dim), apply_(std::move(apply)) {}

    static SymMatVec from_dense(Matrix M);

    Index dim() const { return dim_; }
    void apply(const Vector &x, Vector &y) const { apply_(x, y); }
    Vector operator()(const Vector &x) const {
        Vector y(dim_);
        apply_(x, y);
        return y;
    }
    /// Materializes the operator column by column. O(n) applications.
    Matrix to_dense() const;

  private:
    Index dim_;
    ApplyFn apply_;
};

enum class Side { smallest, largest };

struct LanczosOptions {
    double tol = 1e-9;
    /// 0 selects min(n, 10 k + 100).
    Index max_iter = 0;
};

/// Full eigendecomposition, descending order. Throws InputError on
/// non-finite or non-square input.
EigPairs sym_eig_full(const SymMatrix &M);

/// k extreme eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization. Each returned pair satisfies
/// ||op v - lambda v|| <= tol (|lambda| + ||op||_est).
///
/// Values come back in descending order whichever end is requested, so for
/// Side::smallest the last entry is lambda_n. On exhausting max_iter the
/// iteration is restarted once from the current wanted Ritz vectors; a second
/// failure throws ConvergenceError carrying the best residuals. k == n falls
/// back to a dense eigendecomposition.
EigPairs lanczos_extreme(const SymMatVec &op, Index k, Side side, Rng &rng,
                         const LanczosOptions &opts = {});

struct QrResult {
    Matrix q; ///< n x k, orthonormal columns
    Matrix r; ///< k x k, upper triangular with nonnegative diagonal
    bool rank_deficient = false;
};

/// Thin Householder QR. Near-zero diagonal entries of R (relative 1e-12)
/// set `rank_deficient` but are otherwise allowed.
QrResult thin_qr(const Matrix &B);

struct LeastSquaresResult {
    Matrix x;
    Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm least-squares solution of A X = B through the SVD of A.
/// Singular values below rcond * sigma_max are treated as zero.
LeastSquaresResult least_squares(const Matrix &A, const Matrix &B, double rcond = 1e-12);

struct TruncatedSvd {
    Matrix u;
    Vector sigma;
    Matrix v;

    Matrix product() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Best rank-r approximation of B in Frobenius norm.
TruncatedSvd best_rank_r(const Matrix &B, Index r);

struct PowerIterationResult {
    double value = 0; ///< dominant eigenvalue estimate of a PSD operator
    Index iterations = 0;
    bool converged = false;
};

/// Power iteration for the largest eigenvalue of a positive semidefinite
/// operator. Stops when successive Rayleigh quotients agree to `tol`
/// relative.
PowerIterationResult power_iteration(const SymMatVec &op, Rng &rng, Index max_iter = 200,
                                     double tol = 1e-4);

// Symmetric-matrix vectorization on the Frobenius-orthonormal basis
// {E_ii} U {(E_ij + E_ji)/sqrt(2) : i < j}. Column-major over the upper
// triangle: (0,0), (0,1), (1,1), (0,2), ...
Index svec_dim(Index k);
Vector svec(const SymMatrix &S);
SymMatrix smat(const Vector &s, Index k);

/// Standard normal matrix drawn from rng in column-major order.
Matrix standard_normal(Index rows, Index cols, Rng &rng);

} // namespace spectrafw
