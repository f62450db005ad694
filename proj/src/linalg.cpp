#include <spectrafw/linalg.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spectrafw {

void require_symmetric(const Matrix &M, const char *what) {
    if (M.rows() != M.cols())
        throw InputError(std::string(what) + ": matrix is not square");
    if (!M.allFinite())
        throw InputError(std::string(what) + ": non-finite entries");
    if (M.size() == 0)
        return;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InputError(std::string(what) + ": matrix is not symmetric");
}

SymMatVec SymMatVec::from_dense(Matrix M) {
    auto held = std::make_shared<const Matrix>(std::move(M));
    const Index n = held->rows();
    return SymMatVec(n, [held](const Vector &x, Vector &y) { y.noalias() = (*held) * x; });
}

Matrix SymMatVec::to_dense() const {
    Matrix M(dim_, dim_);
    Vector e = Vector::Zero(dim_), col(dim_);
    for (Index j = 0; j < dim_; ++j) {
        e(j) = 1;
        apply_(e, col);
        M.col(j) = col;
        e(j) = 0;
    }
    return symmetrize(M);
}

EigPairs sym_eig_full(const SymMatrix &M) {
    if (M.rows() != M.cols())
        throw InputError("sym_eig_full: matrix is not square");
    if (!M.allFinite())
        throw InputError("sym_eig_full: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M));
    if (es.info() != Eigen::Success)
        throw ConvergenceError("sym_eig_full: eigensolver failed", Vector());
    // Eigen sorts ascending.
    return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

namespace {

Vector random_unit(Index n, Rng &rng) {
    Vector v = standard_normal(n, 1, rng);
    return v / v.norm();
}

// Orthogonalizes w against the first `cols` columns of Q, twice.
void reorthogonalize(const Matrix &Q, Index cols, Vector &w) {
    if (cols == 0)
        return;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector h = Q.leftCols(cols).transpose() * w;
        w.noalias() -= Q.leftCols(cols) * h;
    }
}

struct LanczosPass {
    EigPairs pairs;
    Vector residuals;
    bool converged = false;
};

// One Lanczos run from `start`. Breakdowns (an invariant subspace found
// before convergence) are handled by continuing from a fresh random vector
// orthogonal to the basis, which leaves T block tridiagonal.
LanczosPass lanczos_pass(const SymMatVec &op, Index k, Side side, const Vector &start,
                         Index max_iter, double tol, Rng &rng) {
    const Index n = op.dim();
    Matrix Q(n, max_iter);
    Vector alpha(max_iter), beta(max_iter);
    Vector q = start / start.norm();
    Vector w(n);
    LanczosPass out;

    Index next_check = k;
    for (Index j = 0; j < max_iter; ++j) {
        Q.col(j) = q;
        op.apply(q, w);
        alpha(j) = q.dot(w);
        w -= alpha(j) * q;
        if (j > 0)
            w -= beta(j - 1) * Q.col(j - 1);
        reorthogonalize(Q, j + 1, w);
        double b = w.norm();

        const Index m = j + 1;
        const bool last = (m == max_iter);
        double op_est = std::abs(alpha.head(m).maxCoeff());
        op_est = std::max(op_est, std::abs(alpha.head(m).minCoeff()));
        const bool breakdown = b <= 1e-13 * std::max(op_est, 1e-300) || b == 0.0;

        if (m >= k && (m >= next_check || last)) {
            Eigen::SelfAdjointEigenSolver<Matrix> tri;
            Vector sub = beta.head(std::max<Index>(m - 1, 0));
            Vector diag = alpha.head(m);
            tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            const Vector &theta = tri.eigenvalues(); // ascending
            const double norm_est = std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
            // Wanted indices in descending order of value.
            std::vector<Index> idx(k);
            for (Index i = 0; i < k; ++i)
                idx[i] = side == Side::largest ? m - 1 - i : k - 1 - i;
            Vector res(k);
            bool ok = true;
            // After a breakdown the basis spans an invariant subspace and the
            // Ritz pairs are exact. A random start has a component in every
            // eigenspace, so the extreme values are among them.
            const double b_eff = breakdown ? 0.0 : b;
            for (Index i = 0; i < k; ++i) {
                res(i) = b_eff * std::abs(tri.eigenvectors()(m - 1, idx[i]));
                if (res(i) > tol * (std::abs(theta(idx[i])) + norm_est))
                    ok = false;
            }
            if (ok || last) {
                out.pairs.values.resize(k);
                Matrix S(m, k);
                for (Index i = 0; i < k; ++i) {
                    out.pairs.values(i) = theta(idx[i]);
                    S.col(i) = tri.eigenvectors().col(idx[i]);
                }
                out.pairs.vectors = Q.leftCols(m) * S;
                out.residuals = res;
                out.converged = ok;
                return out;
            }
            next_check = m + std::max<Index>(2, m / 10);
        }

        if (breakdown) {
            if (m == n)
                break;
            w = random_unit(n, rng);
            reorthogonalize(Q, m, w);
            w /= w.norm();
            beta(j) = 0;
            q = w;
        } else {
            beta(j) = b;
            q = w / b;
        }
    }
    return out;
}

} // namespace

EigPairs lanczos_extreme(const SymMatVec &op, Index k, Side side, Rng &rng,
                         const LanczosOptions &opts) {
    const Index n = op.dim();
    if (k < 1 || k > n)
        throw InputError("lanczos_extreme: need 1 <= k <= n");
    if (k == n) {
        EigPairs all = sym_eig_full(op.to_dense());
        return all;
    }
    Index max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * k + 100;
    max_iter = std::min(max_iter, n);
    max_iter = std::max(max_iter, k);

    LanczosPass pass = lanczos_pass(op, k, side, random_unit(n, rng), max_iter, opts.tol, rng);
    if (pass.converged)
        return pass.pairs;
    // Explicit restart from the wanted Ritz vectors.
    Vector start = pass.pairs.vectors.rowwise().sum();
    if (!(start.norm() > 0) || !start.allFinite())
        start = random_unit(n, rng);
    LanczosPass retry = lanczos_pass(op, k, side, start, max_iter, opts.tol, rng);
    if (retry.converged)
        return retry.pairs;
    throw ConvergenceError("lanczos_extreme: no convergence within max_iter", retry.residuals);
}

QrResult thin_qr(const Matrix &B) {
    const Index n = B.rows(), k = B.cols();
    if (k > n)
        throw InputError("thin_qr: more columns than rows");
    Eigen::HouseholderQR<Matrix> qr(B);
    QrResult out;
    out.q = qr.householderQ() * Matrix::Identity(n, k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index i = 0; i < k; ++i) {
        if (out.r(i, i) < 0) {
            out.r.row(i) *= -1;
            out.q.col(i) *= -1;
        }
    }
    if (k > 0) {
        const double dmax = out.r.diagonal().cwiseAbs().maxCoeff();
        for (Index i = 0; i < k; ++i)
            if (out.r(i, i) <= 1e-12 * dmax)
                out.rank_deficient = true;
        if (dmax == 0)
            out.rank_deficient = true;
    }
    return out;
}

LeastSquaresResult least_squares(const Matrix &A, const Matrix &B, double rcond) {
    if (A.rows() != B.rows())
        throw InputError("least_squares: row count mismatch");
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector &s = svd.singularValues();
    LeastSquaresResult out;
    const double smax = s.size() ? s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (smax > 0 && s(i) > rcond * smax) {
            inv(i) = 1.0 / s(i);
            ++out.rank;
        }
    }
    out.rank_deficient = out.rank < std::min(A.rows(), A.cols());
    out.x = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * B);
    return out;
}

TruncatedSvd best_rank_r(const Matrix &B, Index r) {
    if (r < 0 || r > std::min(B.rows(), B.cols()))
        throw InputError("best_rank_r: need r <= min(rows, cols)");
    Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(r);
    out.sigma = svd.singularValues().head(r);
    out.v = svd.matrixV().leftCols(r);
    for (Index i = 0; i < r; ++i) {
        if (out.sigma(i) == 0) {
            out.u.col(i).setZero();
            out.v.col(i).setZero();
        }
    }
    return out;
}

PowerIterationResult power_iteration(const SymMatVec &op, Rng &rng, Index max_iter, double tol) {
    const Index n = op.dim();
    PowerIterationResult out;
    Vector x = random_unit(n, rng), y(n);
    double prev = 0;
    for (Index it = 0; it < max_iter; ++it) {
        op.apply(x, y);
        const double rq = x.dot(y);
        const double ny = y.norm();
        out.iterations = it + 1;
        out.value = std::max(rq, 0.0);
        if (ny == 0) {
            out.converged = true;
            return out;
        }
        if (it > 0 && std::abs(rq - prev) <= tol * std::abs(rq)) {
            out.converged = true;
            return out;
        }
        prev = rq;
        x = y / ny;
    }
    return out;
}

Index svec_dim(Index k) { return k * (k + 1) / 2; }

Vector svec(const SymMatrix &S) {
    const Index k = S.rows();
    Vector s(svec_dim(k));
    Index p = 0;
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i <= j; ++i)
            s(p++) = i == j ? S(i, j) : std::sqrt(2.0) * 0.5 * (S(i, j) + S(j, i));
    return s;
}

SymMatrix smat(const Vector &s, Index k) {
    if (s.size() != svec_dim(k))
        throw InputError("smat: length does not match k(k+1)/2");
    SymMatrix S(k, k);
    Index p = 0;
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i <= j; ++i) {
            const double v = i == j ? s(p) : s(p) / std::sqrt(2.0);
            S(i, j) = v;
            S(j, i) = v;
            ++p;
        }
    return S;
}

Matrix standard_normal(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = normal(rng);
    return M;
}

} // namespace spectrafw
