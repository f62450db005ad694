#include "internal.hpp"

#include <algorithm>
#include <cmath>

namespace spectrafw {

double line_search_segment(const ProblemInstance &inst, const IterateState &st,
                           const AtomImage &endpoint) {
    if (endpoint.z.size() != st.z.size())
        throw InputError("line_search_segment: endpoint image has the wrong size");
    // theta = 1 - eta measures the move toward the endpoint
    const Vector d = endpoint.z - st.z;
    const double dc = endpoint.c - st.c;
    const OuterFunction &g = inst.g();
    const double slope = g.gradient(st.z).dot(d) + dc;
    if (!(slope < 0))
        return 1.0;

    double theta;
    if (const auto curv = g.quadratic_curvature(d)) {
        theta = *curv > 0 ? std::min(1.0, -slope / *curv) : 1.0;
    } else {
        auto phi = [&](double t) { return g.value(st.z + t * d) + t * dc; };
        const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = 0, b = 1;
        double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
        double f1 = phi(x1), f2 = phi(x2);
        while (b - a > 1e-8) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = phi(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = phi(x2);
            }
        }
        theta = 0.5 * (a + b);
        const double f0 = phi(0.0), fm = phi(theta), fe = phi(1.0);
        if (fe < fm) {
            theta = 1.0;
            if (!(fe < f0))
                theta = 0.0;
        } else if (!(fm < f0)) {
            theta = 0.0;
        }
    }
    return 1.0 - std::clamp(theta, 0.0, 1.0);
}

namespace detail {

double fw_step(const ProblemInstance &inst, IterateState &st, const Vector &v) {
    const Matrix vm = v / v.norm();
    const SymMatrix atom = SymMatrix::Constant(1, 1, inst.tau());
    AtomImage img = atom_image(inst, vm, atom);
    const double eta = line_search_segment(inst, st, img);
    img.z *= 1.0 - eta;
    img.c *= 1.0 - eta;
    apply_update(inst, st, eta, vm, (1.0 - eta) * atom, img);
    return eta;
}

void finish(RunRecord &rec, IterateState &st) {
    rec.final_objective = st.objective;
    rec.final_state = std::move(st);
}

} // namespace detail
} // namespace spectrafw
