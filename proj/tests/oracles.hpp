#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines except plain Eigen.

#include <spectrafw/core.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace oracle {

using spectrafw::Index;
using spectrafw::Matrix;
using spectrafw::Rng;
using spectrafw::SymMatrix;
using spectrafw::Vector;

inline Matrix gaussian(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = nd(rng);
    return m;
}

inline SymMatrix random_symmetric(Index n, Rng &rng) {
    const Matrix g = gaussian(n, n, rng);
    return 0.5 * (g + g.transpose());
}

/// Random PSD matrix of the given rank scaled to the given trace.
inline SymMatrix random_psd(Index n, Index rank, double trace, Rng &rng) {
    const Matrix g = gaussian(n, rank, rng);
    SymMatrix x = g * g.transpose();
    return x * (trace / x.trace());
}

/// Euclidean projection onto {x >= 0, sum x = radius} by enumerating every
/// support set: on a support S the minimizer is v_S - theta with theta fixed
/// by the sum constraint, and the projection is the feasible candidate
/// closest to v.
inline Vector simplex_bruteforce(const Vector &v, double radius) {
    const Index d = v.size();
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        double sum = 0;
        Index count = 0;
        for (Index i = 0; i < d; ++i)
            if (mask & (1u << i)) {
                sum += v(i);
                ++count;
            }
        const double theta = (sum - radius) / static_cast<double>(count);
        Vector x = Vector::Zero(d);
        bool ok = true;
        for (Index i = 0; i < d; ++i)
            if (mask & (1u << i)) {
                x(i) = v(i) - theta;
                if (x(i) < 0)
                    ok = false;
            }
        if (!ok)
            continue;
        const double dist = (x - v).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    return best;
}

/// Central differences of f at x.
inline Vector fd_gradient(const std::function<double(const Vector &)> &f, const Vector &x,
                          double h) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

/// Minimizer of a scalar function on [0, 1] by a uniform grid and a refined
/// second grid around the best point.
inline double grid_argmin(const std::function<double(double)> &f, Index points = 20001) {
    double best_t = 0, best_f = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = f(t);
        if (v < best_f) {
            best_f = v;
            best_t = t;
        }
    }
    const double h = 1.0 / static_cast<double>(points - 1);
    const double lo = std::max(0.0, best_t - h), hi = std::min(1.0, best_t + h);
    for (Index i = 0; i < points; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = f(t);
        if (v < best_f) {
            best_f = v;
            best_t = t;
        }
    }
    return best_t;
}

/// Ascending eigenvalues by Eigen's dense solver.
inline Vector eigenvalues_ascending(const SymMatrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Symmetric matrix with prescribed spectrum in a random orthonormal basis.
inline SymMatrix with_spectrum(const Vector &spectrum, Rng &rng) {
    const Index n = spectrum.size();
    Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
    const Matrix q = qr.householderQ();
    return q * spectrum.asDiagonal() * q.transpose();
}

} // namespace oracle
