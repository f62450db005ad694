#include "oracles.hpp"

#include <spectrafw/linalg.hpp>

#include <doctest.h>

using namespace spectrafw;

TEST_SUITE("linalg") {

TEST_CASE("svec is an isometry and smat inverts it") {
    Rng rng(1);
    for (Index k : {1, 2, 3, 5}) {
        const SymMatrix a = oracle::random_symmetric(k, rng);
        const SymMatrix b = oracle::random_symmetric(k, rng);
        CHECK(svec(a).size() == svec_dim(k));
        CHECK(svec(a).dot(svec(b)) == doctest::Approx(a.cwiseProduct(b).sum()).epsilon(1e-12));
        CHECK((smat(svec(a), k) - a).norm() < 1e-13);
    }
}

TEST_CASE("svec ordering walks the upper triangle column by column") {
    SymMatrix s(3, 3);
    s << 1, 2, 4, 2, 3, 5, 4, 5, 6;
    const Vector v = svec(s);
    const double r2 = std::sqrt(2.0);
    CHECK(v(0) == 1);
    CHECK(v(1) == doctest::Approx(2 * r2));
    CHECK(v(2) == 3);
    CHECK(v(3) == doctest::Approx(4 * r2));
    CHECK(v(4) == doctest::Approx(5 * r2));
    CHECK(v(5) == 6);
}

TEST_CASE("dense eigendecomposition is descending and reconstructs") {
    Rng rng(2);
    const SymMatrix m = oracle::random_symmetric(12, rng);
    const EigPairs e = sym_eig_full(m);
    for (Index i = 1; i < e.size(); ++i)
        CHECK(e.values(i - 1) >= e.values(i));
    CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - m).norm() < 1e-11);
}

TEST_CASE("dense eigendecomposition rejects bad input") {
    Matrix m = Matrix::Identity(3, 3);
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(sym_eig_full(m), InputError);
    CHECK_THROWS_AS(sym_eig_full(Matrix::Zero(2, 3)), InputError);
}

TEST_CASE("lanczos agrees with dense eigenvalues") {
    Rng rng(3);
    for (Index n : {5, 40, 120, 200}) {
        const SymMatrix m = oracle::random_symmetric(n, rng);
        const Vector ref = oracle::eigenvalues_ascending(m);
        const SymMatVec op = SymMatVec::from_dense(m);
        for (Index k : {1, 3, 5}) {
            if (k > n)
                continue;
            const EigPairs lo = lanczos_extreme(op, k, Side::smallest, rng);
            const EigPairs hi = lanczos_extreme(op, k, Side::largest, rng);
            REQUIRE(lo.size() == k);
            for (Index i = 0; i < k; ++i) {
                CHECK(std::abs(lo.values(k - 1 - i) - ref(i)) < 1e-8 * std::max(1.0, std::abs(ref(i))));
                CHECK(std::abs(hi.values(i) - ref(n - 1 - i)) < 1e-8 * std::max(1.0, std::abs(ref(n - 1 - i))));
                const Vector r = m * lo.vectors.col(i) - lo.values(i) * lo.vectors.col(i);
                CHECK(r.norm() < 1e-6);
            }
        }
    }
}

TEST_CASE("lanczos on a matrix-free operator with clustered bottom") {
    Rng rng(4);
    Vector spec = Vector::LinSpaced(80, 1.0, 10.0);
    spec(0) = -5;
    spec(1) = -5 + 1e-3;
    spec(2) = -5 + 2e-3;
    const SymMatrix m = oracle::with_spectrum(spec, rng);
    const SymMatVec op(80, [&m](const Vector &x, Vector &y) { y = m * x; });
    const EigPairs e = lanczos_extreme(op, 3, Side::smallest, rng);
    CHECK(e.values(2) == doctest::Approx(-5).epsilon(1e-9));
    CHECK(e.values(0) == doctest::Approx(-5 + 2e-3).epsilon(1e-9));
}

TEST_CASE("lanczos with k equal to n is exact") {
    Rng rng(5);
    const SymMatrix m = oracle::random_symmetric(4, rng);
    const EigPairs e = lanczos_extreme(SymMatVec::from_dense(m), 4, Side::smallest, rng);
    const Vector ref = oracle::eigenvalues_ascending(m);
    for (Index i = 0; i < 4; ++i)
        CHECK(e.values(3 - i) == doctest::Approx(ref(i)).epsilon(1e-12));
}

TEST_CASE("matrix-free operator materializes") {
    Rng rng(6);
    const SymMatrix m = oracle::random_symmetric(7, rng);
    CHECK((SymMatVec::from_dense(m).to_dense() - m).norm() < 1e-14);
}

TEST_CASE("thin qr") {
    Rng rng(7);
    const Matrix b = oracle::gaussian(30, 6, rng);
    const QrResult qr = thin_qr(b);
    CHECK((qr.q.transpose() * qr.q - Matrix::Identity(6, 6)).norm() < 1e-12);
    CHECK((qr.q * qr.r - b).norm() < 1e-12);
    for (Index i = 0; i < 6; ++i) {
        CHECK(qr.r(i, i) >= 0);
        for (Index j = 0; j < i; ++j)
            CHECK(qr.r(i, j) == 0);
    }
    CHECK_FALSE(qr.rank_deficient);

    Matrix d = b;
    d.col(3) = d.col(1);
    CHECK(thin_qr(d).rank_deficient);
}

TEST_CASE("least squares matches the normal equations and handles rank loss") {
    Rng rng(8);
    const Matrix a = oracle::gaussian(25, 5, rng);
    const Matrix rhs = oracle::gaussian(25, 2, rng);
    const LeastSquaresResult ls = least_squares(a, rhs);
    const Matrix ref = (a.transpose() * a).ldlt().solve(a.transpose() * rhs);
    CHECK((ls.x - ref).norm() < 1e-10);
    CHECK(ls.rank == 5);

    Matrix d = a;
    d.col(4) = d.col(0);
    const LeastSquaresResult deficient = least_squares(d, rhs);
    CHECK(deficient.rank_deficient);
    CHECK(deficient.rank == 4);
    // minimum norm: the two copies share the weight equally
    CHECK(deficient.x(0, 0) == doctest::Approx(deficient.x(4, 0)).epsilon(1e-9));
}

TEST_CASE("best rank r attains the Eckart-Young error") {
    Rng rng(9);
    const Matrix b = oracle::gaussian(15, 10, rng);
    const Eigen::JacobiSVD<Matrix> svd(b);
    const Vector s = svd.singularValues();
    const TruncatedSvd t = best_rank_r(b, 3);
    const double err = (b - t.product()).norm();
    CHECK(err == doctest::Approx(s.tail(7).norm()).epsilon(1e-10));
}

TEST_CASE("power iteration finds the top eigenvalue of a PSD operator") {
    Rng rng(10);
    Vector spec = Vector::LinSpaced(30, 0.0, 1.0);
    spec(29) = 4.0;
    const SymMatrix m = oracle::with_spectrum(spec, rng);
    const PowerIterationResult p = power_iteration(SymMatVec::from_dense(m), rng, 500, 1e-12);
    CHECK(p.converged);
    CHECK(p.value == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("standard normal is reproducible from the seed") {
    Rng a(11), b(11);
    CHECK((standard_normal(4, 3, a) - standard_normal(4, 3, b)).norm() == 0);
}

}
