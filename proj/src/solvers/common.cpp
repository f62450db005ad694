#include "internal.hpp"

#include <cmath>

namespace spectrafw {

const char *to_string(Algorithm a) {
    switch (a) {
    case Algorithm::fw: return "fw";
    case Algorithm::gblockfw: return "gblockfw";
    case Algorithm::specfw: return "specfw";
    case Algorithm::pgd: return "pgd";
    case Algorithm::apgd: return "apgd";
    }
    return "?";
}

const char *to_string(SubproblemKind s) {
    switch (s) {
    case SubproblemKind::exact: return "exact";
    case SubproblemKind::g_model: return "g_model";
    case SubproblemKind::f_model: return "f_model";
    }
    return "?";
}

const char *to_string(StopReason s) {
    switch (s) {
    case StopReason::gap_tol: return "gap_tol";
    case StopReason::max_iters: return "max_iters";
    case StopReason::time_limit: return "time_limit";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string &s) {
    for (Algorithm a : {Algorithm::fw, Algorithm::gblockfw, Algorithm::specfw, Algorithm::pgd,
                        Algorithm::apgd})
        if (s == to_string(a))
            return a;
    throw ConfigError("unknown algorithm '" + s + "' (fw, gblockfw, specfw, pgd, apgd)");
}

SubproblemKind parse_subproblem(const std::string &s) {
    for (SubproblemKind k : {SubproblemKind::exact, SubproblemKind::g_model, SubproblemKind::f_model})
        if (s == to_string(k))
            return k;
    throw ConfigError("unknown subproblem '" + s + "' (exact, g_model, f_model)");
}

void SolverConfig::validate() const {
    if (k < 1)
        throw ConfigError("k must be >= 1");
    if (!(eta > 0 && eta <= 1))
        throw ConfigError("eta must lie in (0, 1]");
    if (beta && !(*beta > 0 && std::isfinite(*beta)))
        throw ConfigError("beta must be positive and finite");
    if (max_iters < 0)
        throw ConfigError("max_iters must be >= 0");
    if (!(time_limit_s > 0))
        throw ConfigError("time_limit_s must be positive");
    if (gap_tol && !(*gap_tol > 0))
        throw ConfigError("gap_tol must be positive");
    if (!(sub_tol > 0))
        throw ConfigError("sub_tol must be positive");
    if (sub_max_iters < 1)
        throw ConfigError("sub_max_iters must be >= 1");
    if (!(lanczos_tol > 0))
        throw ConfigError("lanczos_tol must be positive");
    if (use_sketch) {
        if (algorithm != Algorithm::fw && algorithm != Algorithm::specfw)
            throw ConfigError(std::string("sketching needs fw or specfw; ") + to_string(algorithm) +
                              " requires the dense iterate");
        if (algorithm == Algorithm::specfw && subproblem == SubproblemKind::f_model)
            throw ConfigError("the f_model subproblem requires the dense iterate; disable sketching");
        if (sketch_rank < 1)
            throw ConfigError("sketch_rank must be >= 1");
    }
}

SolverConfig quadratic_sensing_preset(Algorithm algo, Index n, Index k) {
    SolverConfig cfg;
    cfg.algorithm = algo;
    cfg.k = k;
    cfg.eta = 0.4;
    cfg.beta = 2.5 * static_cast<double>(n) * static_cast<double>(n);
    return cfg;
}

RunRecord solve(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    switch (cfg.algorithm) {
    case Algorithm::fw: return fw_run(inst, cfg, sink);
    case Algorithm::gblockfw: return gblockfw_run(inst, cfg, sink);
    case Algorithm::specfw: return specfw_run(inst, cfg, sink);
    case Algorithm::pgd: return pgd_run(inst, cfg, sink);
    case Algorithm::apgd: return apgd_run(inst, cfg, sink);
    }
    throw ConfigError("unknown algorithm");
}

EigPairs gradient_bottom_eigs(const ProblemInstance &inst, const IterateState &st, Index k,
                              Rng &rng, double lanczos_tol, bool *used_dense) {
    RunRecord scratch;
    EigPairs e = detail::extreme_eigs(gradient_matvec(inst, st), k, Side::smallest, rng,
                                      lanczos_tol, &scratch);
    if (used_dense)
        *used_dense = scratch.dense_eig_fallbacks > 0;
    return e;
}

double fw_gap(const ProblemInstance &inst, const IterateState &st, Rng &rng, double lanczos_tol) {
    const EigPairs e = gradient_bottom_eigs(inst, st, 1, rng, lanczos_tol);
    return detail::gap_from_lambda(inst, st, e.values(0));
}

namespace detail {

RunLoop::RunLoop(const SolverConfig &cfg, RunSink *sink, RunRecord &rec, double f0)
    : cfg_(cfg), sink_(sink), rec_(rec), start_(std::chrono::steady_clock::now()) {
    rec_.algorithm = cfg.algorithm;
    rec_.gap_tol_used = cfg.gap_tol ? *cfg.gap_tol : 1e-7 * std::max(1.0, std::abs(f0));
}

double RunLoop::elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

bool RunLoop::record(Index iter, double objective, double gap, double eta, Index rank,
                     double eigengap) {
    IterationRow row;
    row.iter = iter;
    row.wall_time_s = elapsed();
    row.objective = objective;
    row.fw_gap = gap;
    row.eta_hat = eta;
    row.update_rank = rank;
    row.eigengap_est = eigengap;
    rec_.rows.push_back(row);
    if (sink_)
        sink_->on_row(row);

    if (gap <= rec_.gap_tol_used) {
        rec_.stop_reason = StopReason::gap_tol;
        return true;
    }
    if (iter >= cfg_.max_iters) {
        rec_.stop_reason = StopReason::max_iters;
        return true;
    }
    if (row.wall_time_s >= cfg_.time_limit_s) {
        rec_.stop_reason = StopReason::time_limit;
        return true;
    }
    return false;
}

double resolve_beta(const ProblemInstance &inst, const SolverConfig &cfg, RunRecord &rec) {
    if (cfg.beta) {
        rec.beta_used = *cfg.beta;
        rec.beta_converged = true;
    } else {
        const SmoothnessEstimate est = smoothness_beta(inst, std::nullopt, cfg.seed);
        rec.beta_used = inst.tau() * inst.tau() * est.beta;
        rec.beta_converged = est.converged;
    }
    if (!(rec.beta_used > 0))
        throw ConfigError("smoothness constant is zero; supply beta explicitly");
    return rec.beta_used;
}

std::uint64_t sketch_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

double gap_from_lambda(const ProblemInstance &inst, const IterateState &st, double lambda_min) {
    const double inner = st.z.dot(inst.g().gradient(st.z)) + st.c;
    return inner - inst.tau() * lambda_min;
}

EigPairs extreme_eigs(const SymMatVec &op, Index k, Side side, Rng &rng, double tol,
                      RunRecord *rec) {
    try {
        return lanczos_extreme(op, k, side, rng, LanczosOptions{tol, 0});
    } catch (const ConvergenceError &) {
        if (op.dim() > 2000)
            throw;
    }
    if (rec)
        ++rec->dense_eig_fallbacks;
    EigPairs full = sym_eig_full(symmetrize(op.to_dense()));
    EigPairs out;
    if (side == Side::largest) {
        out.values = full.values.head(k);
        out.vectors = full.vectors.leftCols(k);
    } else {
        out.values = full.values.tail(k);
        out.vectors = full.vectors.rightCols(k);
    }
    return out;
}

Index numerical_rank(const Vector &eigenvalues, double rel_tol) {
    if (eigenvalues.size() == 0)
        return 0;
    const double scale = eigenvalues.cwiseAbs().maxCoeff();
    if (scale == 0)
        return 0;
    return (eigenvalues.array() > rel_tol * scale).count();
}

void check_dimensions(const ProblemInstance &inst, const SolverConfig &cfg) {
    cfg.validate();
    if (cfg.k > inst.n())
        throw ConfigError("k exceeds the problem dimension n");
    if (cfg.use_sketch && cfg.sketch_rank > inst.n())
        throw ConfigError("sketch_rank exceeds the problem dimension n");
}

} // namespace detail
} // namespace spectrafw
