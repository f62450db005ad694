#include "internal.hpp"

#include <limits>

namespace spectrafw {

RunRecord fw_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    detail::check_dimensions(inst, cfg);
    RunRecord rec;
    IterateState st =
        initial_state(inst, cfg.use_sketch, cfg.sketch_rank, detail::sketch_seed(cfg.seed));
    detail::RunLoop loop(cfg, sink, rec, st.objective);
    Rng rng(cfg.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    double eta = nan;
    Index rank = 0;
    for (Index t = 0;; ++t) {
        const EigPairs e = detail::extreme_eigs(gradient_matvec(inst, st), 1, Side::smallest, rng,
                                                cfg.lanczos_tol, &rec);
        const double gap = detail::gap_from_lambda(inst, st, e.values(0));
        if (loop.record(t, st.objective, gap, eta, rank, nan))
            break;
        eta = detail::fw_step(inst, st, e.vectors.col(0));
        rank = eta < 1.0 ? 1 : 0;
        st.iter = t + 1;
    }
    detail::finish(rec, st);
    return rec;
}

} // namespace spectrafw
