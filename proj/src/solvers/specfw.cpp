#include "internal.hpp"

#include <algorithm>
#include <limits>

namespace spectrafw {

RunRecord specfw_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    detail::check_dimensions(inst, cfg);
    RunRecord rec;
    IterateState st =
        initial_state(inst, cfg.use_sketch, cfg.sketch_rank, detail::sketch_seed(cfg.seed));
    detail::RunLoop loop(cfg, sink, rec, st.objective);
    const double beta =
        cfg.subproblem == SubproblemKind::f_model ? detail::resolve_beta(inst, cfg, rec) : 0.0;
    if (cfg.subproblem != SubproblemKind::f_model)
        rec.beta_used = cfg.beta.value_or(std::numeric_limits<double>::quiet_NaN());
    Rng rng(cfg.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Index k = cfg.k;

    double eta = nan;
    Index rank = 0;
    for (Index t = 0;; ++t) {
        const EigPairs e = detail::extreme_eigs(gradient_matvec(inst, st), k, Side::smallest, rng,
                                                cfg.lanczos_tol, &rec);
        const double gap = detail::gap_from_lambda(inst, st, e.values(k - 1));
        const double eigengap = k >= 2 ? e.values(0) - e.values(k - 1) : nan;
        if (loop.record(t, st.objective, gap, eta, rank, eigengap))
            break;

        const double tol = std::max(cfg.sub_tol, 1e-9 * gap);
        SubproblemResult sub;
        switch (cfg.subproblem) {
        case SubproblemKind::exact:
            sub = solve_subproblem_exact(inst, st, e.vectors, cfg, tol);
            break;
        case SubproblemKind::g_model:
            sub = solve_subproblem_g_model(inst, st, e.vectors, cfg, tol);
            break;
        case SubproblemKind::f_model:
            sub = solve_subproblem_f_model(inst, st, e.vectors, beta, cfg, tol);
            break;
        }
        const double f_new =
            inst.g().value(sub.eta * st.z + sub.image.z) + (sub.eta * st.c + sub.image.c);
        if (f_new <= st.objective) {
            apply_update(inst, st, sub.eta, e.vectors, inst.tau() * sub.s, sub.image);
            eta = sub.eta;
            rank = sub.eta < 1.0 ? detail::numerical_rank(sym_eig_full(sub.s).values) : 0;
        } else {
            ++rec.fallback_steps;
            eta = detail::fw_step(inst, st, e.vectors.col(k - 1));
            rank = eta < 1.0 ? 1 : 0;
        }
        st.iter = t + 1;
    }
    detail::finish(rec, st);
    return rec;
}

} // namespace spectrafw
