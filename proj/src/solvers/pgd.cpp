#include "internal.hpp"

#include <spectrafw/geometry.hpp>

#include <cmath>
#include <limits>

namespace spectrafw {

namespace {

struct Projected {
    SymMatrix x;
    Index rank = 0;
};

Projected project_with_rank(const SymMatrix &y, double tau) {
    const EigPairs e = sym_eig_full(symmetrize(y));
    const Vector lam = project_simplex(e.values, tau).coords;
    return {symmetrize(e.vectors * lam.asDiagonal() * e.vectors.transpose()),
            (lam.array() > 0).count()};
}

double gradient_gap(const ProblemInstance &inst, const IterateState &st, const SymMatrix &grad,
                    Rng &rng, const SolverConfig &cfg, RunRecord &rec) {
    const EigPairs e = detail::extreme_eigs(SymMatVec::from_dense(grad), 1, Side::smallest, rng,
                                            cfg.lanczos_tol, &rec);
    return detail::gap_from_lambda(inst, st, e.values(0));
}

void require_dense(const SolverConfig &cfg) {
    if (cfg.use_sketch)
        throw ConfigError(std::string(to_string(cfg.algorithm)) + " requires the dense iterate");
}

} // namespace

RunRecord pgd_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    detail::check_dimensions(inst, cfg);
    require_dense(cfg);
    RunRecord rec;
    IterateState st = initial_state(inst);
    detail::RunLoop loop(cfg, sink, rec, st.objective);
    const double tau = inst.tau();
    const double step = tau * tau / detail::resolve_beta(inst, cfg, rec);
    Rng rng(cfg.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Index rank = 0;
    for (Index t = 0;; ++t) {
        const SymMatrix grad = gradient_dense(inst, st);
        const double gap = gradient_gap(inst, st, grad, rng, cfg, rec);
        if (loop.record(t, st.objective, gap, nan, rank, nan))
            break;
        const Projected p = project_with_rank(st.dense() - step * grad, tau);
        st = state_from_dense(inst, p.x);
        rank = p.rank;
        st.iter = t + 1;
    }
    detail::finish(rec, st);
    return rec;
}

RunRecord apgd_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    detail::check_dimensions(inst, cfg);
    require_dense(cfg);
    RunRecord rec;
    IterateState st = initial_state(inst);
    detail::RunLoop loop(cfg, sink, rec, st.objective);
    const double tau = inst.tau();
    const double step = tau * tau / detail::resolve_beta(inst, cfg, rec);
    Rng rng(cfg.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    SymMatrix y = st.dense();
    bool y_is_x = true;
    double mom = 1.0;
    Index rank = 0;
    for (Index t = 0;; ++t) {
        const SymMatrix grad_x = gradient_dense(inst, st);
        const double gap = gradient_gap(inst, st, grad_x, rng, cfg, rec);
        if (loop.record(t, st.objective, gap, nan, rank, nan))
            break;

        const SymMatrix grad_y = y_is_x ? grad_x : gradient_dense(inst, y);
        Projected p = project_with_rank(y - step * grad_y, tau);
        IterateState cand = state_from_dense(inst, p.x);
        if (cand.objective > st.objective && !y_is_x) {
            // objective went up: drop the momentum and take a plain step
            p = project_with_rank(st.dense() - step * grad_x, tau);
            cand = state_from_dense(inst, p.x);
            mom = 1.0;
            y = p.x;
            y_is_x = true;
        } else {
            const double mom_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * mom * mom));
            const double w = (mom - 1.0) / mom_next;
            y = p.x + w * (p.x - st.dense());
            y_is_x = w == 0.0;
            mom = mom_next;
        }
        st = std::move(cand);
        rank = p.rank;
        st.iter = t + 1;
    }
    detail::finish(rec, st);
    return rec;
}

} // namespace spectrafw
