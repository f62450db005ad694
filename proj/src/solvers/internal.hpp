#pragma once

#include <spectrafw/solvers.hpp>

#include <chrono>

namespace spectrafw::detail {

/// Row bookkeeping and stopping rules shared by every run loop.
class RunLoop {
  public:
    RunLoop(const SolverConfig &cfg, RunSink *sink, RunRecord &rec, double f0);

    double elapsed() const;
    /// Appends the row for X_iter; true when the run should stop here.
    bool record(Index iter, double objective, double gap, double eta, Index rank,
                double eigengap);

  private:
    const SolverConfig &cfg_;
    RunSink *sink_;
    RunRecord &rec_;
    std::chrono::steady_clock::time_point start_;
};

/// Unit-trace smoothness: cfg.beta, or tau^2 * smoothness_beta.
double resolve_beta(const ProblemInstance &inst, const SolverConfig &cfg, RunRecord &rec);

/// Seed of the sketch test matrices, kept apart from the Lanczos stream so
/// that dense and sketched runs draw identical start vectors.
std::uint64_t sketch_seed(std::uint64_t seed);

/// <X, grad f(X)> - tau lambda_min from the caches and a known lambda_min.
double gap_from_lambda(const ProblemInstance &inst, const IterateState &st, double lambda_min);

/// k extreme eigenpairs of a dense or matrix-free operator with the dense
/// fallback for n <= 2000.
EigPairs extreme_eigs(const SymMatVec &op, Index k, Side side, Rng &rng, double tol,
                      RunRecord *rec);

Index numerical_rank(const Vector &eigenvalues, double rel_tol = 1e-10);

/// One FW step toward tau v v' with exact line search; returns eta_hat.
double fw_step(const ProblemInstance &inst, IterateState &st, const Vector &v);

/// Moves the final iterate into the record.
void finish(RunRecord &rec, IterateState &st);

void check_dimensions(const ProblemInstance &inst, const SolverConfig &cfg);

} // namespace spectrafw::detail
