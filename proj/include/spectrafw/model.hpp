#pragma once

#include <spectrafw/core.hpp>
#include <spectrafw/linalg.hpp>
#include <spectrafw/sketch.hpp>

#include <memory>
#include <optional>
#include <variant>

namespace spectrafw {

/// Smooth outer function g : R^m -> R of f(X) = g(A X) + <C, X>.
class OuterFunction {
  public:
    virtual ~OuterFunction() = default;

    virtual double value(const Vector &z) const = 0;
    virtual Vector gradient(const Vector &z) const = 0;
    /// Lipschitz constant L_g of the gradient.
    virtual double lipschitz_gradient() const = 0;
    /// Strong convexity modulus; 0 when unknown or absent.
    virtual double strong_convexity() const { return 0; }
    /// d' (Hess g) d when g is quadratic, nullopt otherwise. Quadratic g lets
    /// line searches use the closed form.
    virtual std::optional<double> quadratic_curvature(const Vector &d) const {
        (void)d;
        return std::nullopt;
    }
};

/// g(z) = 1/2 ||z - y||^2.
class LeastSquaresLoss final : public OuterFunction {
  public:
    explicit LeastSquaresLoss(Vector y) : y_(std::move(y)) {}

    double value(const Vector &z) const override { return 0.5 * (z - y_).squaredNorm(); }
    Vector gradient(const Vector &z) const override { return z - y_; }
    double lipschitz_gradient() const override { return 1.0; }
    double strong_convexity() const override { return 1.0; }
    std::optional<double> quadratic_curvature(const Vector &d) const override {
        return d.squaredNorm();
    }
    const Vector &target() const { return y_; }

  private:
    Vector y_;
};

/// g(z) = sum_i log cosh(z_i - y_i): smooth, L_g = 1, not quadratic.
class LogCoshLoss final : public OuterFunction {
  public:
    explicit LogCoshLoss(Vector y) : y_(std::move(y)) {}

    double value(const Vector &z) const override;
    Vector gradient(const Vector &z) const override;
    double lipschitz_gradient() const override { return 1.0; }
    const Vector &target() const { return y_; }

  private:
    Vector y_;
};

/// Linear map A : S^n -> R^m together with its adjoint.
class MeasurementMap {
  public:
    virtual ~MeasurementMap() = default;

    virtual Index dim() const = 0;  ///< n
    virtual Index size() const = 0; ///< m

    virtual Vector apply(const SymMatrix &X) const = 0;
    /// A(V S V'), without forming the n x n product where possible.
    virtual Vector apply_lowrank(const Matrix &V, const SymMatrix &S) const;
    /// (A* w) x.
    virtual Vector adjoint_matvec(const Vector &w, const Vector &x) const = 0;
    /// A* w as a dense matrix.
    virtual SymMatrix adjoint(const Vector &w) const = 0;
    /// The restriction S -> A(V S V') written as an m x k(k+1)/2 matrix on the
    /// svec basis, so that A(V S V') = restricted(V) * svec(S).
    virtual Matrix restricted(const Matrix &V) const;
    /// sum_i ||A_i||_F^2, an upper bound on sigma_max(A)^2.
    virtual double hilbert_schmidt_norm_squared() const = 0;
};

/// A(X)_i = a_i' X a_i with the a_i stored as rows of an m x n matrix.
class QuadraticSensingMap final : public MeasurementMap {
  public:
    explicit QuadraticSensingMap(Matrix rows) : a_(std::move(rows)) {}

    Index dim() const override { return a_.cols(); }
    Index size() const override { return a_.rows(); }
    Vector apply(const SymMatrix &X) const override;
    Vector apply_lowrank(const Matrix &V, const SymMatrix &S) const override;
    Vector adjoint_matvec(const Vector &w, const Vector &x) const override;
    SymMatrix adjoint(const Vector &w) const override;
    Matrix restricted(const Matrix &V) const override;
    double hilbert_schmidt_norm_squared() const override;

    const Matrix &rows() const { return a_; }

  private:
    Matrix a_;
};

/// A(X)_i = <A_i, X> for explicit symmetric A_i. An empty list gives the
/// zero map into R^0.
class SymmetricMatrixMap final : public MeasurementMap {
  public:
    SymmetricMatrixMap(Index n, std::vector<SymMatrix> mats);

    Index dim() const override { return n_; }
    Index size() const override { return static_cast<Index>(mats_.size()); }
    Vector apply(const SymMatrix &X) const override;
    Vector adjoint_matvec(const Vector &w, const Vector &x) const override;
    SymMatrix adjoint(const Vector &w) const override;
    double hilbert_schmidt_norm_squared() const override;

  private:
    Index n_;
    std::vector<SymMatrix> mats_;
};

struct GroundTruth {
    Matrix u_nat; ///< n x r_nat, ||U||_F = 1
    double noise_c = 0;
    std::uint64_t seed = 0;
};

/// minimize g(A X) + <C, X> subject to tr(X) = tau, X PSD.
/// Immutable once built; share freely between concurrent runs.
class ProblemInstance {
  public:
    ProblemInstance(std::shared_ptr<const OuterFunction> g,
                    std::shared_ptr<const MeasurementMap> map, SymMatrix c, double tau,
                    std::optional<GroundTruth> truth = std::nullopt);

    Index n() const { return map_->dim(); }
    Index m() const { return map_->size(); }
    const OuterFunction &g() const { return *g_; }
    const MeasurementMap &map() const { return *map_; }
    std::shared_ptr<const OuterFunction> g_ptr() const { return g_; }
    std::shared_ptr<const MeasurementMap> map_ptr() const { return map_; }
    const SymMatrix &c() const { return *c_; }
    std::shared_ptr<const SymMatrix> c_ptr() const { return c_; }
    bool c_is_zero() const { return c_zero_; }
    double tau() const { return tau_; }
    const std::optional<GroundTruth> &truth() const { return truth_; }

  private:
    std::shared_ptr<const OuterFunction> g_;
    std::shared_ptr<const MeasurementMap> map_;
    std::shared_ptr<const SymMatrix> c_;
    double tau_;
    bool c_zero_;
    std::optional<GroundTruth> truth_;
};

/// Solver iterate: a dense matrix or a sketch, plus the caches
/// z = A(X) and c = <C, X> from which objective and gradient are evaluated.
struct IterateState {
    std::variant<SymMatrix, SketchState> repr;
    Vector z;
    double c = 0;
    double objective = 0;
    Index iter = 0;

    bool is_dense() const { return std::holds_alternative<SymMatrix>(repr); }
    const SymMatrix &dense() const { return std::get<SymMatrix>(repr); }
    SymMatrix &dense() { return std::get<SymMatrix>(repr); }
    const SketchState &sketch() const { return std::get<SketchState>(repr); }
};

/// X0 = (tau / n) I, dense or streamed into a fresh sketch of the given rank.
IterateState initial_state(const ProblemInstance &inst, bool sketched = false,
                           Index sketch_rank = 1, std::uint64_t sketch_seed = 0);

/// Dense state for an arbitrary X, caches computed from X.
IterateState state_from_dense(const ProblemInstance &inst, const SymMatrix &X);

/// Image (A(W), <C, W>) of a low-rank matrix W = V S V'.
struct AtomImage {
    Vector z;
    double c = 0;
};

AtomImage atom_image(const ProblemInstance &inst, const Matrix &V, const SymMatrix &S);

/// Replaces X by eta X + V S V' in every representation and cache. `image`
/// must be atom_image(inst, V, S); callers that already hold it pass it in.
void apply_update(const ProblemInstance &inst, IterateState &st, double eta, const Matrix &V,
                  const SymMatrix &S, const AtomImage &image);
void apply_update(const ProblemInstance &inst, IterateState &st, double eta, const Matrix &V,
                  const SymMatrix &S);

/// f from the caches: g(z) + c.
double objective(const ProblemInstance &inst, const IterateState &st);

/// f(X) evaluated directly from a dense matrix.
double evaluate_dense(const ProblemInstance &inst, const SymMatrix &X);

/// x -> (A* grad g(z)) x + C x, using only the cached z.
SymMatVec gradient_matvec(const ProblemInstance &inst, const IterateState &st);

/// grad f assembled densely from the cached z.
SymMatrix gradient_dense(const ProblemInstance &inst, const IterateState &st);
SymMatrix gradient_dense(const ProblemInstance &inst, const SymMatrix &X);

/// Quadratic sensing: m = 15 n r_nat Gaussian a_i, y = y0 + c ||y0|| v.
ProblemInstance generate_quadratic_sensing(Index n, Index r_nat, double noise_c, double tau,
                                           std::uint64_t seed);

struct SmoothnessEstimate {
    double beta = 0;
    bool converged = true; ///< false: power iteration stopped early, beta is padded
};

/// beta = sigma_max(A)^2 L_g (in the units of the trace-tau problem), or the
/// override when given.
SmoothnessEstimate smoothness_beta(const ProblemInstance &inst,
                                   std::optional<double> override_beta = std::nullopt,
                                   std::uint64_t seed = 0);

/// sigma_max(A)^2 by power iteration on A*A.
PowerIterationResult map_norm_squared(const MeasurementMap &map, Rng &rng,
                                      Index max_iter = 200, double tol = 1e-4);

/// ||X / tau - U U'||_F / ||U U'||_F.
double recovery_error(const SymMatrix &X, double tau, const Matrix &u_nat);

} // namespace spectrafw
