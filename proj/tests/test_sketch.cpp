#include "oracles.hpp"

#include <spectrafw/model.hpp>
#include <spectrafw/sketch.hpp>

#include <doctest.h>

using namespace spectrafw;

namespace {

Matrix orthonormal(Index n, Index k, Rng &rng) {
    return oracle::gaussian(n, k, rng).householderQr().householderQ() * Matrix::Identity(n, k);
}

} // namespace

TEST_SUITE("sketch") {

TEST_CASE("sizes follow the rank") {
    const SketchState st = sketch_init(50, 3, 1);
    CHECK(st.ks == 7);
    CHECK(st.l == 15);
    CHECK(st.psi.rows() == 50);
    CHECK(st.psi.cols() == 7);
    CHECK(st.phi.rows() == 15);
    CHECK(st.phi.cols() == 50);
    CHECK(st.yc.norm() == 0);
    CHECK(st.yr.norm() == 0);
    CHECK_THROWS_AS(sketch_init(5, 6, 0), InputError);
    CHECK_THROWS_AS(sketch_init(5, 0, 0), InputError);
}

TEST_CASE("streams inside a rank-r subspace are recovered exactly") {
    Rng rng(50);
    for (Index n : {20, 80, 200})
        for (Index r : {1, 3, 5}) {
            SketchState st = sketch_init(n, r, 77 + n + r);
            const Matrix basis = orthonormal(n, r, rng);
            SymMatrix shadow = SymMatrix::Zero(n, n);
            std::uniform_real_distribution<double> u(0, 1);
            for (int t = 0; t < 30; ++t) {
                const Index kk = 1 + t % r;
                const Matrix v = basis * orthonormal(r, kk, rng);
                const SymMatrix s = oracle::random_psd(kk, kk, 1.0, rng);
                const double eta = u(rng);
                sketch_update(st, v, s, eta);
                shadow = eta * shadow + v * s * v.transpose();
            }
            const LowRankFactors f = sketch_reconstruct(st);
            CHECK((f.dense() - shadow).norm() <= 1e-8 * shadow.norm());
            CHECK(st.updates == 30);
        }
}

TEST_CASE("a single rank-one update is recovered") {
    Rng rng(51);
    SketchState st = sketch_init(30, 1, 5);
    const Vector v = orthonormal(30, 1, rng);
    sketch_update(st, v, SymMatrix::Constant(1, 1, 2.0), 0.0);
    const LowRankFactors f = sketch_reconstruct(st);
    const Matrix ref = 2.0 * v * v.transpose();
    CHECK((f.dense() - ref).norm() <= 1e-10 * ref.norm());
}

TEST_CASE("sketches are linear in the stream") {
    Rng rng(52);
    SketchState st = sketch_init(25, 2, 9);
    const Matrix psi = st.psi, phi = st.phi;
    SymMatrix shadow = SymMatrix::Zero(25, 25);
    for (int t = 0; t < 5; ++t) {
        const Matrix v = orthonormal(25, 3, rng);
        const SymMatrix s = oracle::random_symmetric(3, rng);
        sketch_update(st, v, s, 0.7);
        shadow = 0.7 * shadow + v * s * v.transpose();
    }
    CHECK((st.yc - shadow * psi).norm() < 1e-10 * (1 + st.yc.norm()));
    CHECK((st.yr - phi * shadow).norm() < 1e-10 * (1 + st.yr.norm()));
}

TEST_CASE("the same seed gives the same test matrices") {
    const SketchState a = sketch_init(40, 2, 123), b = sketch_init(40, 2, 123);
    const SketchState c = sketch_init(40, 2, 124);
    CHECK((a.psi - b.psi).norm() == 0);
    CHECK((a.phi - b.phi).norm() == 0);
    CHECK((a.psi - c.psi).norm() > 0);
}

TEST_CASE("sketched initial state carries the dense caches") {
    const ProblemInstance inst = generate_quadratic_sensing(12, 2, 0.3, 0.5, 4);
    const IterateState dense = initial_state(inst);
    const IterateState sk = initial_state(inst, true, 2, 99);
    CHECK_FALSE(sk.is_dense());
    CHECK((dense.z - sk.z).norm() <= 1e-12 * dense.z.norm());
    CHECK(dense.objective == doctest::Approx(sk.objective).epsilon(1e-14));
    CHECK(sk.sketch().yc.norm() > 0);
}

}
