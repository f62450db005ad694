#include "internal.hpp"

#include <spectrafw/geometry.hpp>

#include <cmath>
#include <functional>
#include <optional>

namespace spectrafw {

namespace {

// value and gradient of a smooth function of (eta, svec S)
using BlockEval = std::function<double(double eta, const Vector &s, double &d_eta, Vector &d_s)>;

void project_block(double &eta, Vector &s, Index k) {
    const EtaBlock p = project_eta_block(eta, smat(s, k));
    eta = p.eta;
    s = svec(p.s);
}

double lambda_max(const SymMatrix &G) { return sym_eig_full(symmetrize(G)).values(0); }

// Exact second-order expansion of the reduced objective about (1, 0) in
// w = (eta, s), available when g is quadratic.
struct CompactQuadratic {
    double f0 = 0;
    Vector grad;
    Matrix hess;

    double eval(double eta, const Vector &s, double &de, Vector &ds) const {
        Vector dw(grad.size());
        dw(0) = eta - 1.0;
        dw.tail(s.size()) = s;
        const Vector hd = hess * dw;
        de = grad(0) + hd(0);
        ds = grad.tail(s.size()) + hd.tail(s.size());
        return f0 + grad.dot(dw) + 0.5 * dw.dot(hd);
    }
};

std::optional<CompactQuadratic> compact_quadratic(const OuterFunction &g, const Vector &z,
                                                  double c, const Matrix &mv, const Vector &cv) {
    if (!g.quadratic_curvature(z))
        return std::nullopt;
    const Index d = mv.cols();
    Matrix q(z.size(), d + 1);
    q.col(0) = z;
    q.rightCols(d) = mv;
    CompactQuadratic cq;
    cq.f0 = g.value(z) + c;
    const Vector gz = g.gradient(z);
    cq.grad = q.transpose() * gz;
    cq.grad(0) += c;
    cq.grad.tail(d) += cv;
    cq.hess.resize(d + 1, d + 1);
    Vector diag(d + 1);
    for (Index i = 0; i <= d; ++i)
        diag(i) = *g.quadratic_curvature(q.col(i));
    for (Index i = 0; i <= d; ++i) {
        cq.hess(i, i) = diag(i);
        for (Index j = 0; j < i; ++j) {
            const double h = 0.5 * (*g.quadratic_curvature(q.col(i) + q.col(j)) - diag(i) - diag(j));
            cq.hess(i, j) = h;
            cq.hess(j, i) = h;
        }
    }
    return cq;
}

// Solves the quadratic exactly on the face found by the iterative method:
// eta free or fixed at 0, S ranging over the PSD matrices with the range of
// the current S. Kept when feasible and not worse beyond rounding.
void polish_on_face(const CompactQuadratic &cq, Index k, SubproblemResult &res) {
    const EigPairs es = sym_eig_full(res.s);
    const Index r = (es.values.array() > 1e-9).count();
    const bool with_eta = res.eta > 1e-12;
    if (r == 0 && !with_eta)
        return;
    const Index d = svec_dim(k), dr = svec_dim(r);
    const Index nu = dr + (with_eta ? 1 : 0);
    const Matrix q = es.vectors.leftCols(r);

    // w = (eta, svec S) = P u with u = (eta, svec W), S = Q W Q'
    Matrix p = Matrix::Zero(d + 1, nu);
    Vector a(nu);
    Index col = 0;
    if (with_eta) {
        p(0, 0) = 1.0;
        a(0) = 1.0;
        col = 1;
    }
    const Vector tr_w = svec(SymMatrix::Identity(r, r));
    for (Index l = 0; l < dr; ++l) {
        Vector e = Vector::Zero(dr);
        e(l) = 1.0;
        p.block(1, col + l, d, 1) = svec(symmetrize(q * smat(e, r) * q.transpose()));
        a(col + l) = tr_w(l);
    }
    Vector w0 = Vector::Zero(d + 1);
    w0(0) = 1.0;
    const Vector lin = p.transpose() * (cq.grad - cq.hess * w0);
    Matrix kkt = Matrix::Zero(nu + 1, nu + 1);
    kkt.topLeftCorner(nu, nu) = p.transpose() * cq.hess * p;
    kkt.block(0, nu, nu, 1) = a;
    kkt.block(nu, 0, 1, nu) = a.transpose();
    Vector rhs(nu + 1);
    rhs.head(nu) = -lin;
    rhs(nu) = 1.0;
    const Vector u = least_squares(kkt, rhs).x.col(0);

    const double eta = with_eta ? u(0) : 0.0;
    const SymMatrix w = smat(u.segment(col, dr), r);
    if (!(eta >= 0) || (r > 0 && !(sym_eig_full(w).values.minCoeff() >= 0)))
        return;
    const Vector s = p.bottomRows(d) * u;
    double de;
    Vector ds;
    const double f = cq.eval(eta, s, de, ds);
    if (!(f <= res.value + 1e-10 * std::max(1.0, std::abs(res.value))))
        return;
    res.value = std::min(f, res.value);
    res.eta = eta;
    res.s = smat(s, k);
}

// The iterate compressed onto span V, read off the caches: s fits z on the
// restricted map in least squares.
Vector compressed_start(const Vector &z, const Matrix &mv) {
    if (mv.rows() == 0)
        return Vector();
    return least_squares(mv, z).x.col(0);
}

// FISTA with function-value restart from the better of (1, 0) and the
// projection of (0, s0). Returns the best iterate seen, so the result is
// never worse than the anchor (1, 0).
SubproblemResult block_apgd(const BlockEval &eval, Index k, double lip, double tol,
                            Index max_iters, const Vector &s0) {
    const Index d = svec_dim(k);
    if (!(lip > 0) || !std::isfinite(lip))
        lip = 1.0;
    const double step = 1.0 / lip;

    double x_eta = 1.0;
    Vector x_s = Vector::Zero(d);
    double ge;
    Vector gs(d);
    double fx = eval(x_eta, x_s, ge, gs);

    SubproblemResult out;
    out.anchor = fx;
    if (s0.size() == d && s0.allFinite()) {
        double c_eta = 0.0;
        Vector c_s = s0;
        project_block(c_eta, c_s, k);
        const double fc = eval(c_eta, c_s, ge, gs);
        if (fc < fx) {
            x_eta = c_eta;
            x_s = c_s;
            fx = fc;
        }
    }
    double best_eta = x_eta, best_f = fx;
    Vector best_s = x_s;

    double y_eta = x_eta;
    Vector y_s = x_s;
    double t = 1.0;
    Index it = 0;
    for (; it < max_iters; ++it) {
        eval(y_eta, y_s, ge, gs);
        double n_eta = y_eta - step * ge;
        Vector n_s = y_s - step * gs;
        project_block(n_eta, n_s, k);
        const double mapping =
            lip * std::sqrt((n_eta - y_eta) * (n_eta - y_eta) + (n_s - y_s).squaredNorm());
        double dummy_e;
        Vector dummy_s(d);
        const double fn = eval(n_eta, n_s, dummy_e, dummy_s);
        if (fn < best_f) {
            best_f = fn;
            best_eta = n_eta;
            best_s = n_s;
        }
        if (mapping <= tol) {
            out.converged = true;
            ++it;
            break;
        }
        if (fn > fx) {
            // restart the momentum from the last accepted point
            t = 1.0;
            y_eta = x_eta;
            y_s = x_s;
            continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double w = (t - 1.0) / tn;
        y_eta = n_eta + w * (n_eta - x_eta);
        y_s = n_s + w * (n_s - x_s);
        x_eta = n_eta;
        x_s = n_s;
        fx = fn;
        t = tn;
    }
    out.iterations = it;
    out.eta = best_eta;
    out.s = smat(best_s, k);
    out.value = best_f;
    return out;
}

} // namespace

ReducedObjective::ReducedObjective(const ProblemInstance &inst, const IterateState &st,
                                   const Matrix &V)
    : inst_(inst), z_(st.z), c_(st.c) {
    if (V.rows() != inst.n() || V.cols() < 1)
        throw InputError("ReducedObjective: V must be n x k with k >= 1");
    mv_ = inst.tau() * inst.map().restricted(V);
    if (inst.c_is_zero())
        cv_ = Vector::Zero(svec_dim(V.cols()));
    else
        cv_ = inst.tau() * svec(symmetrize(V.transpose() * inst.c() * V));
}

double ReducedObjective::value(double eta, const Vector &s) const {
    return inst_.g().value(eta * z_ + mv_ * s) + eta * c_ + cv_.dot(s);
}

double ReducedObjective::gradient(double eta, const Vector &s, double &d_eta, Vector &d_s) const {
    const Vector w = eta * z_ + mv_ * s;
    const Vector gw = inst_.g().gradient(w);
    d_eta = gw.dot(z_) + c_;
    d_s = mv_.transpose() * gw + cv_;
    return inst_.g().value(w) + eta * c_ + cv_.dot(s);
}

double ReducedObjective::lipschitz() const {
    const Index d = mv_.cols();
    SymMatrix gram(d + 1, d + 1);
    gram(0, 0) = z_.squaredNorm();
    gram.block(1, 0, d, 1) = mv_.transpose() * z_;
    gram.block(0, 1, 1, d) = gram.block(1, 0, d, 1).transpose();
    gram.block(1, 1, d, d) = mv_.transpose() * mv_;
    return inst_.g().lipschitz_gradient() * lambda_max(gram) * (1.0 + 1e-6) + 1e-12;
}

SubproblemResult solve_subproblem_exact(const ProblemInstance &inst, const IterateState &st,
                                        const Matrix &V, const SolverConfig &cfg, double tol) {
    const ReducedObjective red(inst, st, V);
    const auto cq = compact_quadratic(inst.g(), st.z, st.c, red.restricted_map(),
                                      red.restricted_cost());
    BlockEval eval;
    if (cq)
        eval = [&cq](double eta, const Vector &s, double &de, Vector &ds) {
            return cq->eval(eta, s, de, ds);
        };
    else
        eval = [&red](double eta, const Vector &s, double &de, Vector &ds) {
            return red.gradient(eta, s, de, ds);
        };
    SubproblemResult out = block_apgd(eval, V.cols(), red.lipschitz(), tol, cfg.sub_max_iters,
                                      compressed_start(st.z, red.restricted_map()));
    if (cq)
        polish_on_face(*cq, V.cols(), out);
    const Vector s = svec(out.s);
    out.image.z = red.restricted_map() * s;
    out.image.c = red.restricted_cost().dot(s);
    return out;
}

SubproblemResult solve_subproblem_g_model(const ProblemInstance &inst, const IterateState &st,
                                          const Matrix &V, const SolverConfig &cfg, double tol) {
    const ReducedObjective red(inst, st, V);
    const Matrix &mv = red.restricted_map();
    const Vector &cv = red.restricted_cost();
    const Vector &z = st.z;
    const double c = st.c;
    const double g0 = inst.g().value(z);
    const Vector grad0 = inst.g().gradient(z);
    const double lg = inst.g().lipschitz_gradient();

    // g(z) + <w - z, grad g(z)> + (L_g / 2) ||w - z||^2 + eta c + <cv, s>
    const BlockEval eval = [&](double eta, const Vector &s, double &de, Vector &ds) {
        const Vector dw = (eta - 1.0) * z + mv * s;
        const Vector r = grad0 + lg * dw;
        de = r.dot(z) + c;
        ds = mv.transpose() * r + cv;
        return g0 + grad0.dot(dw) + 0.5 * lg * dw.squaredNorm() + eta * c + cv.dot(s);
    };
    SubproblemResult out = block_apgd(eval, V.cols(), red.lipschitz(), tol, cfg.sub_max_iters,
                                      compressed_start(z, mv));
    const Vector s = svec(out.s);
    out.image.z = mv * s;
    out.image.c = cv.dot(s);
    return out;
}

SubproblemResult solve_subproblem_f_model(const ProblemInstance &inst, const IterateState &st,
                                          const Matrix &V, double beta, const SolverConfig &cfg,
                                          double tol) {
    if (!st.is_dense())
        throw ConfigError("the f_model subproblem requires the dense iterate");
    if (!(beta > 0))
        throw ConfigError("f_model: beta must be positive");
    const double tau = inst.tau();
    const Index k = V.cols();
    const Index d = svec_dim(k);

    // unit-trace quantities: Xt = X / tau, Gt = tau grad f(X)
    const SymMatrix xt = st.dense() / tau;
    const double f0 = st.objective;
    const double a0 = st.z.dot(inst.g().gradient(st.z)) + st.c; // <Xt, Gt>
    const SymMatVec grad = gradient_matvec(inst, st);
    Matrix gv_cols(inst.n(), k);
    for (Index j = 0; j < k; ++j)
        gv_cols.col(j) = grad(V.col(j));
    const Vector gv = svec(symmetrize(tau * V.transpose() * gv_cols));
    const Vector p = svec(symmetrize(V.transpose() * xt * V));
    const double nx2 = xt.squaredNorm();

    // f0 + (eta - 1) a0 + <gv, s> + (beta / 2) ||(1 - eta) Xt - V S V'||^2
    const BlockEval eval = [&](double eta, const Vector &s, double &de, Vector &ds) {
        const double om = 1.0 - eta;
        de = a0 + beta * (-om * nx2 + p.dot(s));
        ds = gv + beta * (s - om * p);
        return f0 - om * a0 + gv.dot(s) +
               0.5 * beta * (om * om * nx2 - 2.0 * om * p.dot(s) + s.squaredNorm());
    };
    SymMatrix hess = SymMatrix::Identity(d + 1, d + 1);
    hess(0, 0) = nx2;
    hess.block(1, 0, d, 1) = -p;
    hess.block(0, 1, 1, d) = -p.transpose();
    const double lip = beta * lambda_max(hess) * (1.0 + 1e-6) + 1e-12;

    SubproblemResult out = block_apgd(eval, k, lip, tol, cfg.sub_max_iters, p);
    out.image = atom_image(inst, V, tau * out.s);
    return out;
}

} // namespace spectrafw
