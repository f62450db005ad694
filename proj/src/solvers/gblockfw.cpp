#include "internal.hpp"

#include <spectrafw/geometry.hpp>

#include <limits>

namespace spectrafw {

RunRecord gblockfw_run(const ProblemInstance &inst, const SolverConfig &cfg, RunSink *sink) {
    detail::check_dimensions(inst, cfg);
    if (cfg.use_sketch)
        throw ConfigError("gblockfw requires the dense iterate");
    RunRecord rec;
    IterateState st = initial_state(inst);
    detail::RunLoop loop(cfg, sink, rec, st.objective);
    const double beta = detail::resolve_beta(inst, cfg, rec);
    Rng rng(cfg.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double tau = inst.tau();
    const double step = cfg.eta;
    const double coef = tau / (step * beta);

    double eta = nan;
    Index rank = 0;
    for (Index t = 0;; ++t) {
        const SymMatVec grad = gradient_matvec(inst, st);
        const EigPairs e =
            detail::extreme_eigs(grad, 1, Side::smallest, rng, cfg.lanczos_tol, &rec);
        const double gap = detail::gap_from_lambda(inst, st, e.values(0));
        if (loop.record(t, st.objective, gap, eta, rank, nan))
            break;

        // top-k eigenpairs of X/tau - (1 / (eta beta)) tau grad f(X)
        const SymMatrix &x = st.dense();
        const SymMatVec target(inst.n(), [&](const Vector &v, Vector &y) {
            y = x * v / tau - coef * grad(v);
        });
        const EigPairs top =
            detail::extreme_eigs(target, cfg.k, Side::largest, rng, cfg.lanczos_tol, &rec);
        const Vector lam = project_simplex(top.values, 1.0).coords;
        const SymMatrix s = (step * tau) * lam.asDiagonal().toDenseMatrix();
        apply_update(inst, st, 1.0 - step, top.vectors, s);
        eta = 1.0 - step;
        rank = (lam.array() > 0).count();
        st.iter = t + 1;
    }
    detail::finish(rec, st);
    return rec;
}

} // namespace spectrafw
