#include <spectrafw/geometry.hpp>
#include <spectrafw/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace spectrafw {

SimplexPoint project_simplex(const Vector &v, double radius) {
    if (v.size() < 1)
        throw InputError("project_simplex: empty vector");
    if (!(radius > 0) || !std::isfinite(radius))
        throw InputError("project_simplex: radius must be positive and finite");
    if (!v.allFinite())
        throw InputError("project_simplex: non-finite entries");

    const Index d = v.size();
    std::vector<double> u(v.data(), v.data() + d);
    std::sort(u.begin(), u.end(), std::greater<>());

    // theta = (sum of the rho largest - radius) / rho for the largest rho with
    // u_rho - theta_rho > 0.
    double cumsum = 0, theta = 0;
    for (Index j = 0; j < d; ++j) {
        cumsum += u[j];
        const double t = (cumsum - radius) / static_cast<double>(j + 1);
        if (u[j] - t > 0)
            theta = t;
    }

    SimplexPoint out;
    out.radius = radius;
    out.coords = (v.array() - theta).cwiseMax(0.0);
    const double sum = out.coords.sum();
    if (std::abs(sum - radius) > 1e-12 * std::max(1.0, radius) && sum > 0)
        out.coords *= radius / sum;
    return out;
}

EtaBlock project_eta_block(double eta, const SymMatrix &S) {
    const Index k = S.rows();
    if (k < 1 || S.cols() != k)
        throw InputError("project_eta_block: S must be square with k >= 1");
    EigPairs eig = sym_eig_full(S);
    Vector joint(k + 1);
    joint(0) = eta;
    joint.tail(k) = eig.values;
    const SimplexPoint p = project_simplex(joint, 1.0);
    EtaBlock out;
    out.eta = p.coords(0);
    out.s = eig.vectors * p.coords.tail(k).asDiagonal() * eig.vectors.transpose();
    out.s = symmetrize(out.s);
    return out;
}

SymMatrix project_spectrahedron(const SymMatrix &X, double radius) {
    EigPairs eig = sym_eig_full(X);
    const SimplexPoint p = project_simplex(eig.values, radius);
    return symmetrize(eig.vectors * p.coords.asDiagonal() * eig.vectors.transpose());
}

} // namespace spectrafw
