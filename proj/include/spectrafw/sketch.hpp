#pragma once

#include <spectrafw/core.hpp>

namespace spectrafw {

/// Two-sided randomized sketch (Yc, Yr) = (X Psi, Phi X) of a matrix that is
/// only observed through updates X <- eta X + V S V'.
struct SketchState {
    Index n = 0;
    Index rank = 0; ///< target rank r
    Index ks = 0;   ///< 2r + 1 columns of Psi
    Index l = 0;    ///< 4r + 3 rows of Phi
    Matrix psi;     ///< n x ks
    Matrix phi;     ///< l x n
    Matrix yc;      ///< n x ks
    Matrix yr;      ///< l x n
    std::uint64_t seed = 0;
    Index updates = 0;
};

/// Fresh sketch with seeded standard normal test matrices and zero sketches.
SketchState sketch_init(Index n, Index r, std::uint64_t seed);

/// Yc <- V S (V' Psi) + eta Yc,  Yr <- (Phi V) S V' + eta Yr.
void sketch_update(SketchState &st, const Matrix &V, const SymMatrix &S, double eta);

/// X_hat = (Q U) diag(sigma) V' with Yc = Q R and [B]_r = U diag(sigma) V',
/// B = (Phi Q)^+ Yr. X_hat need not be PSD.
struct LowRankFactors {
    Matrix left;  ///< n x r
    Vector sigma; ///< r
    Matrix right; ///< n x r
    bool ill_conditioned = false;

    Matrix dense() const { return left * sigma.asDiagonal() * right.transpose(); }
};

LowRankFactors sketch_reconstruct(const SketchState &st);

} // namespace spectrafw
