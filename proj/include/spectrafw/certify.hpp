#pragma once

#include <spectrafw/model.hpp>

namespace spectrafw {

/// Strict-complementarity report for a candidate solution X.
struct KktCertificate {
    double s_star = 0;  ///< lambda_n(grad f(X))
    Vector z_spectrum;  ///< eigenvalues of Z = grad f(X) - s_star I, descending
    double eigengap = 0; ///< lambda_{n-r}(grad f) - lambda_n(grad f), r = rank_x
    Index rank_x = 0;
    Index rank_z = 0;
    double comp_residual = 0; ///< <Z, X> / tau
    bool strict_comp = false; ///< rank_x + rank_z == n
    bool partial_spectrum = false; ///< large n: z_spectrum holds only the bottom end
};

/// Throws InputError when X is not feasible to 1e-6. A feasible but
/// non-optimal X yields a large comp_residual rather than an error.
KktCertificate kkt_certificate(const ProblemInstance &inst, const SymMatrix &X,
                               double rank_tol = 1e-6);

enum class GrowthCase { strongly_convex_g, rank_deficient_one };

const char *to_string(GrowthCase c);

/// Quadratic growth constant: f(X) - f* >= gamma ||X - X*||_F^2 on the
/// feasible set, in the units of the trace-tau problem.
struct GrowthConstant {
    double gamma = 0;
    double gamma_unit = 0; ///< the same constant for the unit-trace problem f(tau X)
    GrowthCase which = GrowthCase::strongly_convex_g;
    double lambda_gap = 0;  ///< lambda_{n-r}(Z*) of the trace-tau problem
    double sigma_max = 0;   ///< sigma_max of X -> [tr X; tau A X]  (case i)
    double sigma_min_v = 0; ///< sigma_min of its restriction to V S V'  (case i)
    double alpha = 0;       ///< strong convexity of g  (case i)
};

/// Throws PreconditionError when strict complementarity fails, or in case (i)
/// when g is not strongly convex.
GrowthConstant growth_constant(const ProblemInstance &inst, const KktCertificate &cert,
                               const SymMatrix &X, std::uint64_t seed = 0);

/// W in the face {V S V' : S PSD, tr S = tr X} spanned by the bottom-r
/// eigenvectors V of Y with <X - W, Y> >= (delta / 2) ||X - W||_F^2, where
/// delta = lambda_{n-r}(Y) - lambda_{n-r+1}(Y). Throws PreconditionError when
/// delta is not positive.
SymMatrix face_witness(const SymMatrix &Y, Index r, const SymMatrix &X);

struct GrowthSampleReport {
    Index samples = 0;
    Index violations = 0;
    double worst_slack = 0; ///< min over samples of f(X) - f* - gamma ||X - X*||^2
};

/// Samples feasible X = (1 - t) X* + t R with R a random trace-tau PSD matrix
/// and checks f(X) - f* >= gamma ||X - X*||^2 - tol.
GrowthSampleReport sample_quadratic_growth(const ProblemInstance &inst, const SymMatrix &x_star,
                                           double f_star, double gamma, Index samples, Rng &rng,
                                           double tol = 1e-8);

} // namespace spectrafw
