#include <spectrafw/model.hpp>

#include <cmath>

namespace spectrafw {

double LogCoshLoss::value(const Vector &z) const {
    if (z.size() != y_.size())
        throw InputError("LogCoshLoss: size mismatch");
    double s = 0;
    for (Index i = 0; i < z.size(); ++i) {
        // log cosh t = |t| + log1p(exp(-2|t|)) - log 2, stable for large |t|
        const double t = std::abs(z(i) - y_(i));
        s += t + std::log1p(std::exp(-2 * t)) - std::log(2.0);
    }
    return s;
}

Vector LogCoshLoss::gradient(const Vector &z) const {
    if (z.size() != y_.size())
        throw InputError("LogCoshLoss: size mismatch");
    return (z - y_).array().tanh().matrix();
}

// ---- MeasurementMap defaults ----

Vector MeasurementMap::apply_lowrank(const Matrix &V, const SymMatrix &S) const {
    return apply(symmetrize(V * S * V.transpose()));
}

Matrix MeasurementMap::restricted(const Matrix &V) const {
    const Index k = V.cols();
    const Index d = svec_dim(k);
    Matrix out(size(), d);
    Vector e = Vector::Zero(d);
    for (Index j = 0; j < d; ++j) {
        e.setZero();
        e(j) = 1;
        out.col(j) = apply_lowrank(V, smat(e, k));
    }
    return out;
}

// ---- QuadraticSensingMap ----

Vector QuadraticSensingMap::apply(const SymMatrix &X) const {
    if (X.rows() != dim() || X.cols() != dim())
        throw InputError("QuadraticSensingMap::apply: shape mismatch");
    return ((a_ * X).array() * a_.array()).rowwise().sum().matrix();
}

Vector QuadraticSensingMap::apply_lowrank(const Matrix &V, const SymMatrix &S) const {
    if (V.rows() != dim() || S.rows() != V.cols() || S.cols() != V.cols())
        throw InputError("QuadraticSensingMap::apply_lowrank: shape mismatch");
    const Matrix b = a_ * V;
    return ((b * S).array() * b.array()).rowwise().sum().matrix();
}

Vector QuadraticSensingMap::adjoint_matvec(const Vector &w, const Vector &x) const {
    if (w.size() != size() || x.size() != dim())
        throw InputError("QuadraticSensingMap::adjoint_matvec: shape mismatch");
    return a_.transpose() * (w.array() * (a_ * x).array()).matrix();
}

SymMatrix QuadraticSensingMap::adjoint(const Vector &w) const {
    if (w.size() != size())
        throw InputError("QuadraticSensingMap::adjoint: size mismatch");
    const Matrix wa = w.asDiagonal() * a_;
    return symmetrize(a_.transpose() * wa);
}

Matrix QuadraticSensingMap::restricted(const Matrix &V) const {
    if (V.rows() != dim())
        throw InputError("QuadraticSensingMap::restricted: shape mismatch");
    const Index k = V.cols();
    const Matrix b = a_ * V;
    Matrix out(size(), svec_dim(k));
    const double r2 = std::sqrt(2.0);
    Index col = 0;
    for (Index q = 0; q < k; ++q)
        for (Index p = 0; p <= q; ++p) {
            out.col(col) = b.col(p).cwiseProduct(b.col(q));
            if (p != q)
                out.col(col) *= r2;
            ++col;
        }
    return out;
}

double QuadraticSensingMap::hilbert_schmidt_norm_squared() const {
    return a_.rowwise().squaredNorm().array().square().sum();
}

// ---- SymmetricMatrixMap ----

SymmetricMatrixMap::SymmetricMatrixMap(Index n, std::vector<SymMatrix> mats)
    : n_(n), mats_(std::move(mats)) {
    if (n < 1)
        throw InputError("SymmetricMatrixMap: n must be positive");
    for (const auto &a : mats_) {
        if (a.rows() != n || a.cols() != n)
            throw InputError("SymmetricMatrixMap: matrix of wrong shape");
        require_symmetric(a, "SymmetricMatrixMap");
    }
}

Vector SymmetricMatrixMap::apply(const SymMatrix &X) const {
    if (X.rows() != n_ || X.cols() != n_)
        throw InputError("SymmetricMatrixMap::apply: shape mismatch");
    Vector z(size());
    for (Index i = 0; i < size(); ++i)
        z(i) = mats_[i].cwiseProduct(X).sum();
    return z;
}

Vector SymmetricMatrixMap::adjoint_matvec(const Vector &w, const Vector &x) const {
    if (w.size() != size() || x.size() != n_)
        throw InputError("SymmetricMatrixMap::adjoint_matvec: shape mismatch");
    Vector y = Vector::Zero(n_);
    for (Index i = 0; i < size(); ++i)
        y.noalias() += w(i) * (mats_[i] * x);
    return y;
}

SymMatrix SymmetricMatrixMap::adjoint(const Vector &w) const {
    if (w.size() != size())
        throw InputError("SymmetricMatrixMap::adjoint: size mismatch");
    SymMatrix out = SymMatrix::Zero(n_, n_);
    for (Index i = 0; i < size(); ++i)
        out += w(i) * mats_[i];
    return out;
}

double SymmetricMatrixMap::hilbert_schmidt_norm_squared() const {
    double s = 0;
    for (const auto &a : mats_)
        s += a.squaredNorm();
    return s;
}

// ---- ProblemInstance ----

ProblemInstance::ProblemInstance(std::shared_ptr<const OuterFunction> g,
                                 std::shared_ptr<const MeasurementMap> map, SymMatrix c,
                                 double tau, std::optional<GroundTruth> truth)
    : g_(std::move(g)), map_(std::move(map)), tau_(tau), truth_(std::move(truth)) {
    if (!g_ || !map_)
        throw InputError("ProblemInstance: null outer function or map");
    if (!(tau > 0) || !std::isfinite(tau))
        throw InputError("ProblemInstance: tau must be positive and finite");
    const Index n = map_->dim();
    if (c.size() == 0)
        c = SymMatrix::Zero(n, n);
    if (c.rows() != n || c.cols() != n)
        throw InputError("ProblemInstance: C has the wrong shape");
    require_symmetric(c, "ProblemInstance: C");
    c_zero_ = c.isZero(0.0);
    c_ = std::make_shared<const SymMatrix>(std::move(c));
    if (truth_ && truth_->u_nat.rows() != n)
        throw InputError("ProblemInstance: ground truth has the wrong number of rows");
}

// ---- iterate state ----

namespace {

void refresh_objective(const ProblemInstance &inst, IterateState &st) {
    st.objective = inst.g().value(st.z) + st.c;
}

} // namespace

IterateState initial_state(const ProblemInstance &inst, bool sketched, Index sketch_rank,
                           std::uint64_t sketch_seed) {
    const Index n = inst.n();
    const double d = inst.tau() / static_cast<double>(n);
    IterateState st;
    if (sketched) {
        SketchState sk = sketch_init(n, sketch_rank, sketch_seed);
        const Matrix eye = Matrix::Identity(n, n);
        sketch_update(sk, eye, d * eye, 0.0);
        st.repr = std::move(sk);
        st.z = inst.map().apply(d * eye);
    } else {
        SymMatrix x0 = d * SymMatrix::Identity(n, n);
        st.z = inst.map().apply(x0);
        st.repr = std::move(x0);
    }
    st.c = inst.c_is_zero() ? 0.0 : d * inst.c().trace();
    refresh_objective(inst, st);
    return st;
}

IterateState state_from_dense(const ProblemInstance &inst, const SymMatrix &X) {
    if (X.rows() != inst.n() || X.cols() != inst.n())
        throw InputError("state_from_dense: shape mismatch");
    IterateState st;
    st.z = inst.map().apply(X);
    st.c = inst.c_is_zero() ? 0.0 : inst.c().cwiseProduct(X).sum();
    st.repr = X;
    refresh_objective(inst, st);
    return st;
}

AtomImage atom_image(const ProblemInstance &inst, const Matrix &V, const SymMatrix &S) {
    AtomImage img;
    img.z = inst.map().apply_lowrank(V, S);
    if (!inst.c_is_zero())
        img.c = (V.transpose() * inst.c() * V).cwiseProduct(S).sum();
    return img;
}

void apply_update(const ProblemInstance &inst, IterateState &st, double eta, const Matrix &V,
                  const SymMatrix &S, const AtomImage &image) {
    if (V.rows() != inst.n() || S.rows() != V.cols() || S.cols() != V.cols())
        throw InputError("apply_update: shape mismatch");
    if (st.is_dense()) {
        SymMatrix &x = st.dense();
        x = eta * x + V * S * V.transpose();
        x = symmetrize(x);
    } else {
        sketch_update(std::get<SketchState>(st.repr), V, S, eta);
    }
    st.z = eta * st.z + image.z;
    st.c = eta * st.c + image.c;
    refresh_objective(inst, st);
}

void apply_update(const ProblemInstance &inst, IterateState &st, double eta, const Matrix &V,
                  const SymMatrix &S) {
    apply_update(inst, st, eta, V, S, atom_image(inst, V, S));
}

double objective(const ProblemInstance &inst, const IterateState &st) {
    return inst.g().value(st.z) + st.c;
}

double evaluate_dense(const ProblemInstance &inst, const SymMatrix &X) {
    double v = inst.g().value(inst.map().apply(X));
    if (!inst.c_is_zero())
        v += inst.c().cwiseProduct(X).sum();
    return v;
}

SymMatVec gradient_matvec(const ProblemInstance &inst, const IterateState &st) {
    auto w = std::make_shared<const Vector>(inst.g().gradient(st.z));
    auto map = inst.map_ptr();
    auto c = inst.c_is_zero() ? nullptr : inst.c_ptr();
    return SymMatVec(inst.n(), [w, map, c](const Vector &x, Vector &y) {
        y = map->adjoint_matvec(*w, x);
        if (c)
            y.noalias() += (*c) * x;
    });
}

SymMatrix gradient_dense(const ProblemInstance &inst, const IterateState &st) {
    SymMatrix gm = inst.map().adjoint(inst.g().gradient(st.z));
    if (!inst.c_is_zero())
        gm += inst.c();
    return gm;
}

SymMatrix gradient_dense(const ProblemInstance &inst, const SymMatrix &X) {
    return gradient_dense(inst, state_from_dense(inst, X));
}

// ---- generator ----

ProblemInstance generate_quadratic_sensing(Index n, Index r_nat, double noise_c, double tau,
                                           std::uint64_t seed) {
    if (n < 1 || r_nat < 1 || r_nat > n)
        throw InputError("generate_quadratic_sensing: need 1 <= r_nat <= n");
    if (!(noise_c >= 0) || !std::isfinite(noise_c))
        throw InputError("generate_quadratic_sensing: noise level must be >= 0");
    const Index m = 15 * n * r_nat;
    Rng rng(seed);
    Matrix u = standard_normal(n, r_nat, rng);
    u /= u.norm();
    // each a_i drawn as a contiguous block of n normals
    Matrix a = standard_normal(n, m, rng).transpose();
    Vector v = standard_normal(m, 1, rng);
    v /= v.norm();

    const Matrix au = a * u;
    const Vector y0 = au.rowwise().squaredNorm();
    Vector y = y0;
    if (noise_c > 0)
        y += noise_c * y0.norm() * v;

    GroundTruth truth{u, noise_c, seed};
    auto g = std::make_shared<LeastSquaresLoss>(std::move(y));
    auto map = std::make_shared<QuadraticSensingMap>(std::move(a));
    return ProblemInstance(g, map, SymMatrix(), tau, std::move(truth));
}

// ---- smoothness ----

PowerIterationResult map_norm_squared(const MeasurementMap &map, Rng &rng, Index max_iter,
                                      double tol) {
    const Index n = map.dim();
    if (map.size() == 0)
        return {0.0, 0, true};
    SymMatVec op(n * n, [&map, n](const Vector &x, Vector &y) {
        const Eigen::Map<const Matrix> xm(x.data(), n, n);
        const SymMatrix out = map.adjoint(map.apply(symmetrize(xm)));
        y = Eigen::Map<const Vector>(out.data(), n * n);
    });
    return power_iteration(op, rng, max_iter, tol);
}

SmoothnessEstimate smoothness_beta(const ProblemInstance &inst, std::optional<double> override_beta,
                                   std::uint64_t seed) {
    if (override_beta) {
        if (!(*override_beta > 0) || !std::isfinite(*override_beta))
            throw ConfigError("smoothness_beta: beta must be positive and finite");
        return {*override_beta, true};
    }
    Rng rng(seed);
    const PowerIterationResult p = map_norm_squared(inst.map(), rng);
    const double lg = inst.g().lipschitz_gradient();
    if (p.converged)
        return {p.value * lg, true};
    return {inst.map().hilbert_schmidt_norm_squared() * lg, false};
}

double recovery_error(const SymMatrix &X, double tau, const Matrix &u_nat) {
    if (!(tau > 0))
        throw InputError("recovery_error: tau must be positive");
    if (X.rows() != u_nat.rows() || X.cols() != u_nat.rows())
        throw InputError("recovery_error: shape mismatch");
    const Matrix uu = u_nat * u_nat.transpose();
    const double den = uu.norm();
    if (den == 0)
        throw InputError("recovery_error: zero ground truth");
    return (X / tau - uu).norm() / den;
}

} // namespace spectrafw
