#pragma once

#include <spectrafw/core.hpp>

namespace spectrafw {

/// Point of the scaled simplex {x >= 0, sum x = radius}.
struct SimplexPoint {
    Vector coords;
    double radius = 1;
};

/// Pair (eta, S) with eta >= 0, S PSD and eta + tr(S) = 1.
struct EtaBlock {
    double eta = 1;
    SymMatrix s;
};

/// Euclidean projection onto {x >= 0, sum x = radius} by the sort-and-threshold
/// method.
SimplexPoint project_simplex(const Vector &v, double radius = 1.0);

/// Euclidean projection onto {(eta, S) : eta + tr(S) = 1, S PSD, eta >= 0}.
/// Eigendecomposes S and projects (eta, eigenvalues) onto the (k+1)-simplex.
EtaBlock project_eta_block(double eta, const SymMatrix &S);

/// Frobenius projection onto {Y PSD, tr(Y) = radius}.
SymMatrix project_spectrahedron(const SymMatrix &X, double radius = 1.0);

} // namespace spectrafw
