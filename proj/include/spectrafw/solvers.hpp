#pragma once

#include <spectrafw/model.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace spectrafw {

enum class Algorithm { fw, gblockfw, specfw, pgd, apgd };
enum class SubproblemKind { exact, g_model, f_model };
enum class StopReason { gap_tol, max_iters, time_limit };

const char *to_string(Algorithm a);
const char *to_string(SubproblemKind s);
const char *to_string(StopReason s);
Algorithm parse_algorithm(const std::string &s);       ///< throws ConfigError
SubproblemKind parse_subproblem(const std::string &s); ///< throws ConfigError

struct SolverConfig {
    Algorithm algorithm = Algorithm::specfw;
    Index k = 1;
    double eta = 0.4; ///< G-BlockFW step
    /// Smoothness of the unit-trace problem f(tau X), i.e. tau^2 ||A||^2 L_g.
    /// Unset: estimated by smoothness_beta and scaled by tau^2.
    std::optional<double> beta;
    Index max_iters = 1000;
    double time_limit_s = std::numeric_limits<double>::infinity();
    /// Unset: 1e-7 max(1, |f(X0)|).
    std::optional<double> gap_tol;
    SubproblemKind subproblem = SubproblemKind::exact;
    double sub_tol = 1e-10;
    Index sub_max_iters = 20000;
    double lanczos_tol = 1e-9;
    bool use_sketch = false;
    Index sketch_rank = 3;
    std::uint64_t seed = 0;

    /// Throws ConfigError on out-of-range fields or incompatible combinations.
    void validate() const;
};

/// Settings of the quadratic-sensing experiments: eta = 0.4, beta = 2.5 n^2.
SolverConfig quadratic_sensing_preset(Algorithm algo, Index n, Index k);

/// Row t describes X_t. eta_hat and update_rank belong to the step that
/// produced X_t (NaN and 0 on row 0).
struct IterationRow {
    Index iter = 0;
    double wall_time_s = 0;
    double objective = 0;
    double fw_gap = 0;
    double eta_hat = std::numeric_limits<double>::quiet_NaN();
    Index update_rank = 0;
    double eigengap_est = std::numeric_limits<double>::quiet_NaN();
};

class RunSink {
  public:
    virtual ~RunSink() = default;
    virtual void on_row(const IterationRow &row) = 0;
};

struct RunRecord {
    Algorithm algorithm = Algorithm::specfw;
    std::vector<IterationRow> rows;
    double final_objective = 0;
    IterateState final_state;
    StopReason stop_reason = StopReason::max_iters;
    double beta_used = 0;       ///< unit-trace smoothness
    bool beta_converged = true; ///< false when the power iteration gave up
    double gap_tol_used = 0;
    Index fallback_steps = 0; ///< subproblem steps replaced by an FW step
    Index dense_eig_fallbacks = 0;
};

/// Dispatches on cfg.algorithm.
RunRecord solve(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink = nullptr);

RunRecord fw_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink = nullptr);
RunRecord gblockfw_run(const ProblemInstance &inst, const SolverConfig &cfg,
                       RunSink *sink = nullptr);
RunRecord specfw_run(const ProblemInstance &inst, const SolverConfig &cfg,
                     RunSink *sink = nullptr);
RunRecord pgd_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink = nullptr);
RunRecord apgd_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink = nullptr);

/// <X, grad f(X)> - tau lambda_min(grad f(X)), from the caches.
double fw_gap(const ProblemInstance &inst, const IterateState &st, Rng &rng,
              double lanczos_tol = 1e-9);

/// k smallest eigenpairs of grad f(X) (descending, last = lambda_n). Falls
/// back to a dense eigendecomposition for n <= 2000 when Lanczos fails.
EigPairs gradient_bottom_eigs(const ProblemInstance &inst, const IterateState &st, Index k,
                              Rng &rng, double lanczos_tol, bool *used_dense = nullptr);

/// argmin over eta in [0,1] of f(eta X + (1 - eta) W), where `endpoint` is
/// the image (A(W), <C, W>) of a feasible W. Closed form for quadratic g,
/// golden section otherwise; ties go to eta = 1.
double line_search_segment(const ProblemInstance &inst, const IterateState &st,
                           const AtomImage &endpoint);

struct SubproblemResult {
    double eta = 1;
    SymMatrix s;         ///< k x k, unit-trace scale: the update is tau V S V'
    double value = 0;    ///< objective of the solved problem (f or its model) at (eta, S)
    double anchor = 0;   ///< the same objective at (1, 0)
    AtomImage image;     ///< (A, C) image of tau V S V'
    Index iterations = 0;
    bool converged = false;
};

/// The reduced problem min_{eta + tr S = 1, S PSD, eta >= 0} f(eta X + tau V S V')
/// and its two upper models, each solved by accelerated projected gradient
/// on (eta, svec S). `tol` bounds the norm of the projected-gradient map.
SubproblemResult solve_subproblem_exact(const ProblemInstance &inst, const IterateState &st,
                                        const Matrix &V, const SolverConfig &cfg, double tol);
SubproblemResult solve_subproblem_g_model(const ProblemInstance &inst, const IterateState &st,
                                          const Matrix &V, const SolverConfig &cfg, double tol);
/// Needs the dense iterate. `beta` is the unit-trace smoothness.
SubproblemResult solve_subproblem_f_model(const ProblemInstance &inst, const IterateState &st,
                                          const Matrix &V, double beta, const SolverConfig &cfg,
                                          double tol);

/// Reduced objective of the exact subproblem and its gradient in
/// (eta, svec S) coordinates; exposed for finite-difference tests.
struct ReducedObjective {
    ReducedObjective(const ProblemInstance &inst, const IterateState &st, const Matrix &V);
    double value(double eta, const Vector &s) const;
    double gradient(double eta, const Vector &s, double &d_eta, Vector &d_s) const;
    Index dim() const { return mv_.cols(); }
    /// Lipschitz constant of the gradient in (eta, s).
    double lipschitz() const;
    const Matrix &restricted_map() const { return mv_; }
    const Vector &restricted_cost() const { return cv_; }

  private:
    const ProblemInstance &inst_;
    const Vector &z_;
    double c_;
    Matrix mv_; ///< tau A(V . V') on the svec basis
    Vector cv_; ///< tau svec(V' C V)
};

} // namespace spectrafw
