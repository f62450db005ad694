#include <spectrafw/linalg.hpp>
#include <spectrafw/sketch.hpp>

namespace spectrafw {

SketchState sketch_init(Index n, Index r, std::uint64_t seed) {
    if (r < 1 || r > n)
        throw InputError("sketch_init: need 1 <= r <= n");
    SketchState st;
    st.n = n;
    st.rank = r;
    st.ks = 2 * r + 1;
    st.l = 4 * r + 3;
    st.seed = seed;
    Rng rng(seed);
    st.psi = standard_normal(n, st.ks, rng);
    st.phi = standard_normal(st.l, n, rng);
    st.yc = Matrix::Zero(n, st.ks);
    st.yr = Matrix::Zero(st.l, n);
    return st;
}

void sketch_update(SketchState &st, const Matrix &V, const SymMatrix &S, double eta) {
    if (V.rows() != st.n || S.rows() != V.cols() || S.cols() != V.cols())
        throw InputError("sketch_update: shape mismatch");
    const Matrix vs = V * S;
    st.yc = eta * st.yc + vs * (V.transpose() * st.psi);
    st.yr = eta * st.yr + (st.phi * V) * vs.transpose();
    ++st.updates;
}

LowRankFactors sketch_reconstruct(const SketchState &st) {
    LowRankFactors out;
    const Index r = st.rank;
    if (st.updates == 0 || st.yc.isZero(0.0)) {
        out.left = Matrix::Zero(st.n, r);
        out.sigma = Vector::Zero(r);
        out.right = Matrix::Zero(st.n, r);
        return out;
    }
    const QrResult qr = thin_qr(st.yc);
    const LeastSquaresResult ls = least_squares(st.phi * qr.q, st.yr, 1e-12);
    const TruncatedSvd svd = best_rank_r(ls.x, std::min<Index>(r, std::min(ls.x.rows(), ls.x.cols())));
    out.left = qr.q * svd.u;
    out.sigma = svd.sigma;
    out.right = svd.v;
    out.ill_conditioned = ls.rank_deficient;
    return out;
}

} // namespace spectrafw
