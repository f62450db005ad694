#include "oracles.hpp"

#include <spectrafw/model.hpp>

#include <doctest.h>

using namespace spectrafw;

namespace {

// f(X) = 1/2 sum_i (a_i' X a_i - y_i)^2 + <C, X>, written out term by term
double qs_direct(const Matrix &a, const Vector &y, const SymMatrix &c, const SymMatrix &x) {
    double f = 0;
    for (Index i = 0; i < a.rows(); ++i) {
        const Vector ai = a.row(i).transpose();
        const double r = ai.dot(x * ai) - y(i);
        f += 0.5 * r * r;
    }
    return f + c.cwiseProduct(x).sum();
}

ProblemInstance small_qs(Index n, Index m, Rng &rng, bool with_c) {
    const Matrix a = oracle::gaussian(m, n, rng);
    const Vector y = oracle::gaussian(m, 1, rng);
    const SymMatrix c = with_c ? oracle::random_symmetric(n, rng) : SymMatrix();
    return ProblemInstance(std::make_shared<LeastSquaresLoss>(y),
                           std::make_shared<QuadraticSensingMap>(a), c, 1.0);
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("quadratic sensing objective matches direct evaluation") {
    Rng rng(30);
    const ProblemInstance inst = small_qs(10, 40, rng, true);
    const auto &map = dynamic_cast<const QuadraticSensingMap &>(inst.map());
    const auto &g = dynamic_cast<const LeastSquaresLoss &>(inst.g());
    for (int t = 0; t < 5; ++t) {
        const SymMatrix x = oracle::random_psd(10, 3, 1.0, rng);
        const double ref = qs_direct(map.rows(), g.target(), inst.c(), x);
        CHECK(evaluate_dense(inst, x) == doctest::Approx(ref).epsilon(1e-10));
        const IterateState st = state_from_dense(inst, x);
        CHECK(objective(inst, st) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("objective at a perfect fit is zero") {
    Rng rng(31);
    const Matrix a = oracle::gaussian(20, 5, rng);
    const SymMatrix x = oracle::random_psd(5, 2, 1.0, rng);
    const QuadraticSensingMap map(a);
    const ProblemInstance inst(std::make_shared<LeastSquaresLoss>(map.apply(x)),
                               std::make_shared<QuadraticSensingMap>(a), SymMatrix(), 1.0);
    CHECK(evaluate_dense(inst, x) == doctest::Approx(0.0));
    CHECK(inst.c_is_zero());
}

TEST_CASE("adjoint identity on random probes") {
    Rng rng(32);
    const ProblemInstance inst = small_qs(8, 30, rng, false);
    const MeasurementMap &map = inst.map();
    for (int t = 0; t < 100; ++t) {
        const SymMatrix x = oracle::random_symmetric(8, rng);
        const Vector w = oracle::gaussian(30, 1, rng);
        const double lhs = map.apply(x).dot(w);
        const double rhs = x.cwiseProduct(map.adjoint(w)).sum();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        const Vector v = oracle::gaussian(8, 1, rng);
        CHECK((map.adjoint_matvec(w, v) - map.adjoint(w) * v).norm() < 1e-9 * (1 + v.norm()));
    }
}

TEST_CASE("low-rank apply and restricted map agree with the dense map") {
    Rng rng(33);
    const ProblemInstance inst = small_qs(9, 25, rng, false);
    const MeasurementMap &map = inst.map();
    const Matrix v = oracle::gaussian(9, 3, rng);
    const SymMatrix s = oracle::random_symmetric(3, rng);
    const Vector ref = map.apply(v * s * v.transpose());
    CHECK((map.apply_lowrank(v, s) - ref).norm() < 1e-10 * ref.norm());
    CHECK((map.restricted(v) * svec(s) - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("explicit matrix map uses the generic low-rank paths") {
    Rng rng(34);
    std::vector<SymMatrix> mats;
    for (int i = 0; i < 6; ++i)
        mats.push_back(oracle::random_symmetric(5, rng));
    const SymmetricMatrixMap map(5, mats);
    const Matrix v = oracle::gaussian(5, 2, rng);
    const SymMatrix s = oracle::random_symmetric(2, rng);
    const Vector ref = map.apply(v * s * v.transpose());
    CHECK((map.apply_lowrank(v, s) - ref).norm() < 1e-10 * ref.norm());
    CHECK((map.restricted(v) * svec(s) - ref).norm() < 1e-10 * ref.norm());
    double hs = 0;
    for (const auto &m : mats)
        hs += m.squaredNorm();
    CHECK(map.hilbert_schmidt_norm_squared() == doctest::Approx(hs));
    CHECK(SymmetricMatrixMap(4, {}).size() == 0);
}

TEST_CASE("gradient agrees with finite differences") {
    Rng rng(35);
    const ProblemInstance inst = small_qs(6, 30, rng, true);
    for (int t = 0; t < 10; ++t) {
        const SymMatrix x = oracle::random_psd(6, 6, 1.0, rng);
        const SymMatrix d = oracle::random_symmetric(6, rng);
        const SymMatrix grad = gradient_dense(inst, x);
        const double h = 1e-5;
        const double fd = (evaluate_dense(inst, x + h * d) - evaluate_dense(inst, x - h * d)) / (2 * h);
        const double an = grad.cwiseProduct(d).sum();
        CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("gradient operator is the assembled gradient and is symmetric") {
    Rng rng(36);
    const ProblemInstance inst = small_qs(7, 35, rng, true);
    const SymMatrix x = oracle::random_psd(7, 2, 1.0, rng);
    const IterateState st = state_from_dense(inst, x);
    const SymMatVec op = gradient_matvec(inst, st);
    const SymMatrix dense = gradient_dense(inst, st);
    CHECK((op.to_dense() - dense).norm() < 1e-9 * (1 + dense.norm()));
    CHECK((dense - gradient_dense(inst, x)).norm() < 1e-9 * (1 + dense.norm()));
    const Vector u = oracle::gaussian(7, 1, rng), v = oracle::gaussian(7, 1, rng);
    CHECK(u.dot(op(v)) == doctest::Approx(op(u).dot(v)).epsilon(1e-8));
}

TEST_CASE("gradient operator with zero outer gradient is C") {
    Rng rng(37);
    const Matrix a = oracle::gaussian(15, 4, rng);
    const SymMatrix c = oracle::random_symmetric(4, rng);
    const SymMatrix x = oracle::random_psd(4, 2, 1.0, rng);
    const QuadraticSensingMap map(a);
    const ProblemInstance inst(std::make_shared<LeastSquaresLoss>(map.apply(x)),
                               std::make_shared<QuadraticSensingMap>(a), c, 1.0);
    const IterateState st = state_from_dense(inst, x);
    CHECK((gradient_matvec(inst, st).to_dense() - c).norm() < 1e-9);
}

TEST_CASE("log-cosh loss is stable and has the right gradient") {
    Rng rng(38);
    const Vector y = oracle::gaussian(5, 1, rng);
    const LogCoshLoss g(y);
    Vector z = oracle::gaussian(5, 1, rng);
    const Vector fd = oracle::fd_gradient([&g](const Vector &v) { return g.value(v); }, z, 1e-6);
    CHECK((fd - g.gradient(z)).norm() < 1e-7);
    z(0) = 1e4;
    CHECK(std::isfinite(g.value(z)));
    CHECK(g.gradient(z)(0) == doctest::Approx(1.0));
}

TEST_CASE("updates keep the caches coherent and the iterate feasible") {
    Rng rng(39);
    const ProblemInstance inst = small_qs(8, 30, rng, true);
    IterateState st = initial_state(inst);
    CHECK(st.dense().trace() == doctest::Approx(1.0));
    for (int t = 0; t < 20; ++t) {
        const Matrix v = oracle::gaussian(8, 2, rng).householderQr().householderQ() * Matrix::Identity(8, 2);
        std::uniform_real_distribution<double> u(0, 1);
        const double eta = u(rng);
        const SymMatrix s = oracle::random_psd(2, 2, (1 - eta) * inst.tau(), rng);
        apply_update(inst, st, eta, v, s);
        const Vector z = inst.map().apply(st.dense());
        CHECK((z - st.z).norm() <= 1e-8 * (1 + z.norm()));
        const double c = inst.c().cwiseProduct(st.dense()).sum();
        CHECK(std::abs(c - st.c) <= 1e-8 * (1 + std::abs(c)));
        CHECK(st.dense().trace() == doctest::Approx(inst.tau()).epsilon(1e-8));
        CHECK(oracle::eigenvalues_ascending(st.dense())(0) >= -1e-8);
        CHECK(st.objective == doctest::Approx(evaluate_dense(inst, st.dense())).epsilon(1e-10));
    }
}

TEST_CASE("generator") {
    const ProblemInstance inst = generate_quadratic_sensing(20, 3, 0.5, 0.5, 7);
    CHECK(inst.m() == 15 * 20 * 3);
    CHECK(inst.n() == 20);
    CHECK(inst.tau() == 0.5);
    REQUIRE(inst.truth());
    CHECK(inst.truth()->u_nat.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(generate_quadratic_sensing(100, 3, 0.5, 0.5, 0).m() == 4500);

    const ProblemInstance again = generate_quadratic_sensing(20, 3, 0.5, 0.5, 7);
    const auto &g1 = dynamic_cast<const LeastSquaresLoss &>(inst.g());
    const auto &g2 = dynamic_cast<const LeastSquaresLoss &>(again.g());
    CHECK((g1.target() - g2.target()).norm() == 0);

    // noise is c ||y0|| v with v a unit vector
    const ProblemInstance clean = generate_quadratic_sensing(20, 3, 0.0, 1.0, 7);
    const Matrix &u = clean.truth()->u_nat;
    const SymMatrix m = u * u.transpose();
    CHECK(evaluate_dense(clean, m) == doctest::Approx(0.0));
    const Vector y0 = clean.map().apply(m);
    const Vector noise = g1.target() - y0;
    CHECK(noise.norm() == doctest::Approx(0.5 * y0.norm()).epsilon(1e-10));

    CHECK_THROWS_AS(generate_quadratic_sensing(3, 4, 0.5, 0.5, 0), InputError);
    CHECK_THROWS_AS(generate_quadratic_sensing(5, 2, -1, 0.5, 0), InputError);
}

TEST_CASE("smoothness estimate") {
    Rng rng(40);
    const ProblemInstance inst = small_qs(6, 40, rng, false);
    // dense oracle: A as an m x n^2 matrix on vec(X)
    const auto &map = dynamic_cast<const QuadraticSensingMap &>(inst.map());
    Matrix flat(40, 36);
    for (Index i = 0; i < 40; ++i) {
        const Vector ai = map.rows().row(i).transpose();
        const Matrix outer = ai * ai.transpose();
        flat.row(i) = Eigen::Map<const Vector>(outer.data(), 36).transpose();
    }
    const double ref = Eigen::JacobiSVD<Matrix>(flat).singularValues()(0);
    const SmoothnessEstimate est = smoothness_beta(inst);
    CHECK(est.converged);
    CHECK(std::abs(est.beta - ref * ref) <= 0.01 * ref * ref);
    CHECK(smoothness_beta(inst, 9.0e5).beta == 9.0e5);
    CHECK_THROWS_AS(smoothness_beta(inst, -1.0), ConfigError);

    // identity embedding of the diagonal: beta = 1
    std::vector<SymMatrix> mats;
    for (Index i = 0; i < 4; ++i) {
        SymMatrix e = SymMatrix::Zero(4, 4);
        e(i, i) = 1;
        mats.push_back(e);
    }
    const ProblemInstance diag(std::make_shared<LeastSquaresLoss>(Vector::Zero(4)),
                               std::make_shared<SymmetricMatrixMap>(4, mats), SymMatrix(), 1.0);
    CHECK(smoothness_beta(diag).beta == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("recovery error") {
    Rng rng(41);
    Matrix u = oracle::gaussian(6, 2, rng);
    u /= u.norm();
    const SymMatrix m = u * u.transpose();
    CHECK(recovery_error(0.5 * m, 0.5, u) == doctest::Approx(0.0));
    CHECK(recovery_error(SymMatrix::Zero(6, 6), 0.5, u) == doctest::Approx(1.0));
    CHECK_THROWS_AS(recovery_error(m, 0.0, u), InputError);
}

TEST_CASE("instance validation") {
    Rng rng(42);
    const Matrix a = oracle::gaussian(5, 3, rng);
    auto g = std::make_shared<LeastSquaresLoss>(Vector::Zero(5));
    auto map = std::make_shared<QuadraticSensingMap>(a);
    CHECK_THROWS_AS(ProblemInstance(g, map, SymMatrix(), 0.0), InputError);
    CHECK_THROWS_AS(ProblemInstance(g, map, SymMatrix::Identity(4, 4), 1.0), InputError);
    Matrix asym = Matrix::Identity(3, 3);
    asym(0, 1) = 1;
    CHECK_THROWS_AS(ProblemInstance(g, map, asym, 1.0), InputError);
    CHECK_THROWS_AS(ProblemInstance(nullptr, map, SymMatrix(), 1.0), InputError);
}

}
