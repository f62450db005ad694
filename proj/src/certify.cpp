#include <spectrafw/certify.hpp>

#include <cmath>
#include <limits>

namespace spectrafw {

namespace {

Index count_above(const Vector &v, double threshold) {
    return (v.array() > threshold).count();
}

void require_feasible(const SymMatrix &X, double tau, const char *what) {
    require_symmetric(X, what);
    const double tol = 1e-6 * std::max(1.0, tau);
    if (std::abs(X.trace() - tau) > tol)
        throw InputError(std::string(what) + ": trace differs from tau by more than 1e-6");
    const double lmin = sym_eig_full(X).values.minCoeff();
    if (lmin < -tol)
        throw InputError(std::string(what) + ": matrix is not positive semidefinite");
}

} // namespace

const char *to_string(GrowthCase c) {
    return c == GrowthCase::strongly_convex_g ? "strongly_convex_g" : "rank_deficient_one";
}

KktCertificate kkt_certificate(const ProblemInstance &inst, const SymMatrix &X, double rank_tol) {
    const Index n = inst.n();
    if (X.rows() != n || X.cols() != n)
        throw InputError("kkt_certificate: X has the wrong shape");
    if (!(rank_tol > 0))
        throw InputError("kkt_certificate: rank_tol must be positive");
    require_feasible(X, inst.tau(), "kkt_certificate");

    KktCertificate cert;
    const EigPairs ex = sym_eig_full(X);
    cert.rank_x = count_above(ex.values, rank_tol * ex.values.cwiseAbs().maxCoeff());

    const IterateState st = state_from_dense(inst, X);
    Vector lam;
    if (n <= 2000) {
        lam = sym_eig_full(gradient_dense(inst, st)).values;
    } else {
        // the bottom of the spectrum plus lambda_1 for the rank scale
        Rng rng(0);
        const SymMatVec op = gradient_matvec(inst, st);
        const Index kb = std::min<Index>(n - 1, std::max<Index>(2 * cert.rank_x + 2, 10));
        const EigPairs bottom = lanczos_extreme(op, kb, Side::smallest, rng);
        const EigPairs top = lanczos_extreme(op, 1, Side::largest, rng);
        lam.resize(kb + 1);
        lam(0) = top.values(0);
        lam.tail(kb) = bottom.values;
        cert.partial_spectrum = true;
    }
    cert.s_star = lam(lam.size() - 1);
    cert.z_spectrum = lam.array() - cert.s_star;
    cert.z_spectrum(cert.z_spectrum.size() - 1) = 0.0;

    const double zscale = cert.z_spectrum.cwiseAbs().maxCoeff();
    if (cert.partial_spectrum) {
        // entries not computed lie between the two ends and are all nonzero
        const Index small = (cert.z_spectrum.tail(cert.z_spectrum.size() - 1).array() <=
                             rank_tol * zscale)
                                .count();
        cert.rank_z = n - small;
    } else {
        cert.rank_z = count_above(cert.z_spectrum, rank_tol * zscale);
    }

    const Index r = cert.rank_x;
    const Index len = cert.z_spectrum.size();
    if (r >= 1 && r < n && len - r - 1 >= 0)
        cert.eigengap = cert.z_spectrum(len - r - 1) - cert.z_spectrum(len - 1);
    else
        cert.eigengap = std::numeric_limits<double>::quiet_NaN();

    const double gx = st.z.dot(inst.g().gradient(st.z)) + st.c;
    cert.comp_residual = (gx - cert.s_star * X.trace()) / inst.tau();
    cert.strict_comp = cert.rank_x + cert.rank_z == n;
    return cert;
}

GrowthConstant growth_constant(const ProblemInstance &inst, const KktCertificate &cert,
                               const SymMatrix &X, std::uint64_t seed) {
    if (!cert.strict_comp)
        throw PreconditionError("growth_constant: strict complementarity does not hold");
    const Index n = inst.n();
    const double tau = inst.tau();
    const Index r = cert.rank_x;
    const Index len = cert.z_spectrum.size();
    GrowthConstant out;

    if (cert.rank_z == n - 1) {
        out.which = GrowthCase::rank_deficient_one;
        out.lambda_gap = cert.z_spectrum(len - 2);
        out.gamma_unit = tau * out.lambda_gap / 2.0;
        out.gamma = out.gamma_unit / (tau * tau);
        return out;
    }

    out.which = GrowthCase::strongly_convex_g;
    out.alpha = inst.g().strong_convexity();
    if (!(out.alpha > 0))
        throw PreconditionError("growth_constant: rank(Z) < n - 1 needs a strongly convex g");
    out.lambda_gap = cert.eigengap;

    // A~(X) = [tr X; tau A(X)] for the unit-trace problem, restricted to V S V'
    const IterateState st = state_from_dense(inst, X);
    const EigPairs e = sym_eig_full(gradient_dense(inst, st));
    const Matrix V = e.vectors.rightCols(r);
    const Index d = svec_dim(r);
    Matrix av(inst.m() + 1, d);
    av.row(0) = svec(SymMatrix::Identity(r, r)).transpose();
    av.bottomRows(inst.m()) = tau * inst.map().restricted(V);
    Eigen::JacobiSVD<Matrix> svd(av);
    out.sigma_min_v = av.rows() >= d ? svd.singularValues()(d - 1) : 0.0;
    if (!(out.sigma_min_v > 1e-12 * std::max(1.0, svd.singularValues()(0))))
        throw PreconditionError("growth_constant: the restricted map is singular on the face of X");

    Rng rng(seed);
    const MeasurementMap &map = inst.map();
    SymMatVec gram(n * n, [&map, n, tau](const Vector &x, Vector &y) {
        const Eigen::Map<const Matrix> xm(x.data(), n, n);
        const SymMatrix xs = symmetrize(xm);
        SymMatrix out = tau * tau * map.adjoint(map.apply(xs));
        out.diagonal().array() += xs.trace();
        y = Eigen::Map<const Vector>(out.data(), n * n);
    });
    out.sigma_max = std::sqrt(power_iteration(gram, rng, 200, 1e-6).value);

    const double ratio = out.sigma_max * out.sigma_max / (out.sigma_min_v * out.sigma_min_v);
    const double lam_unit = tau * out.lambda_gap;
    out.gamma_unit = std::min(lam_unit / (4.0 + 8.0 * ratio),
                              out.alpha * out.sigma_min_v * out.sigma_min_v / 8.0);
    out.gamma = out.gamma_unit / (tau * tau);
    return out;
}

SymMatrix face_witness(const SymMatrix &Y, Index r, const SymMatrix &X) {
    const Index n = Y.rows();
    require_symmetric(Y, "face_witness: Y");
    require_symmetric(X, "face_witness: X");
    if (X.rows() != n)
        throw InputError("face_witness: X and Y differ in size");
    if (r < 1 || r >= n)
        throw InputError("face_witness: need 1 <= r < n");
    const EigPairs e = sym_eig_full(Y);
    const double delta = e.values(n - r - 1) - e.values(n - r);
    if (!(delta > 0))
        throw PreconditionError("face_witness: zero eigengap between lambda_{n-r} and lambda_{n-r+1}");

    const Matrix U = e.vectors.rightCols(r);
    const SymMatrix x2 = symmetrize(U.transpose() * X * U);
    const EigPairs e2 = sym_eig_full(x2);
    const double eps = X.trace() - x2.trace();
    const Vector lw = e2.values.array() + eps / static_cast<double>(r);
    const Matrix B = U * e2.vectors;
    return symmetrize(B * lw.asDiagonal() * B.transpose());
}

GrowthSampleReport sample_quadratic_growth(const ProblemInstance &inst, const SymMatrix &x_star,
                                           double f_star, double gamma, Index samples, Rng &rng,
                                           double tol) {
    const Index n = inst.n();
    const double tau = inst.tau();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<Index> rank_dist(1, n);
    GrowthSampleReport rep;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < samples; ++i) {
        const Matrix g = standard_normal(n, rank_dist(rng), rng);
        SymMatrix R = g * g.transpose();
        R *= tau / R.trace();
        // t^3 puts most samples near X*
        const double t = std::pow(unif(rng), 3);
        const SymMatrix x = (1.0 - t) * x_star + t * R;
        const double slack = evaluate_dense(inst, x) - f_star - gamma * (x - x_star).squaredNorm();
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < -tol)
            ++rep.violations;
        ++rep.samples;
    }
    return rep;
}

} // namespace spectrafw
