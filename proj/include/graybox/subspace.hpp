#pragma once

#include <algorithm>

#include "graybox/sim.hpp"

namespace graybox {

struct SubspaceConfig {
    Index s = 0;  // block rows of the Hankel matrices; 0 = default_block_rows(n)
    Index n = 0;  // assumed system order

    void check() const {
        if (n < 1)
            throw std::invalid_argument("subspace: order n must be positive");
        if (s <= n)
            throw std::invalid_argument("subspace: block rows s must exceed the order n");
    }
};

inline Index default_block_rows(Index n) { return std::max<Index>(10, 2 * n + 2); }

template <typename Scalar>
struct MoespResult {
    StateSpace<Scalar> ss;
    VecX<Scalar> singular_values;  // of the output residual factor
    Scalar sv_gap_ratio = 0;       // sigma_{n+1} / sigma_n; near 1 = weak order gap
    bool weak_gap = false;
};

namespace detail {

template <typename Scalar>
MatX<Scalar> block_hankel(const MatX<Scalar>& z, Index s) {
    const Index d = z.rows();
    const Index cols = z.cols() - s + 1;
    MatX<Scalar> h(d * s, cols);
    for (Index k = 0; k < s; ++k)
        h.middleRows(k * d, d) = z.middleCols(k, cols);
    return h;
}

}  // namespace detail

/// Ordinary MOESP. Builds depth-s input/output block-Hankel matrices, takes
/// the lower-triangular factor of their stacked orthogonal-triangular
/// factorization, and reads the extended observability matrix off the SVD of
/// the output residual block: C-hat is its first block row, A-hat the
/// shift-invariance least squares. B-hat (D fixed to zero) and the initial
/// state come from one linear regression on the measured output; the x0
/// estimate is discarded. Consistent for white measurement noise independent
/// of a white input.
template <typename Scalar>
MoespResult<Scalar> moesp(const SimData<Scalar>& sim, SubspaceConfig cfg) {
    const Index m = sim.U.rows();
    const Index p = sim.Y.rows();
    const Index n_samples = sim.U.cols();
    if (sim.Y.cols() != n_samples)
        throw std::invalid_argument("moesp: U and Y sample counts differ");
    if (cfg.s == 0)
        cfg.s = default_block_rows(cfg.n);
    cfg.check();
    const Index s = cfg.s;
    const Index n = cfg.n;
    const Index j = n_samples - s + 1;
    if (j < s * (m + p) + n)
        throw std::invalid_argument("moesp: too few samples for the requested Hankel depth");

    MatX<Scalar> stacked(s * (m + p), j);
    stacked.topRows(s * m) = detail::block_hankel(sim.U, s);
    stacked.bottomRows(s * p) = detail::block_hankel(sim.Y, s);

    // [U; Y] = L Q' with L lower triangular: take the R factor of the
    // transposed problem.
    Eigen::HouseholderQR<MatX<Scalar>> qr(stacked.transpose());
    MatX<Scalar> r = qr.matrixQR()
                         .topRows(s * (m + p))
                         .template triangularView<Eigen::Upper>();
    MatX<Scalar> l = r.transpose();

    // Excitation check on the input block L11.
    {
        Eigen::JacobiSVD<MatX<Scalar>> svd_u(l.topLeftCorner(s * m, s * m));
        const auto& sv = svd_u.singularValues();
        if (!(sv(sv.size() - 1) > Scalar(1e-10) * std::max(Scalar(1), sv(0))))
            throw DataError("moesp: input is not persistently exciting");
    }

    MatX<Scalar> l22 = l.block(s * m, s * m, s * p, s * p);
    Eigen::JacobiSVD<MatX<Scalar>> svd(l22, Eigen::ComputeThinU);
    VecX<Scalar> sv = svd.singularValues();
    if (!(sv(n - 1) > Scalar(0)))
        throw DataError("moesp: output factor rank below the requested order");

    MoespResult<Scalar> out;
    out.singular_values = sv;
    out.sv_gap_ratio = sv(n) / sv(n - 1);
    out.weak_gap = out.sv_gap_ratio > Scalar(0.5);

    // Extended observability estimate; columns of U_n are kept unscaled.
    MatX<Scalar> gamma = svd.matrixU().leftCols(n);
    MatX<Scalar> c_hat = gamma.topRows(p);
    MatX<Scalar> a_hat = gamma.topRows((s - 1) * p)
                             .colPivHouseholderQr()
                             .solve(gamma.bottomRows((s - 1) * p));

    // y(k) = C A^k x0 + C xB(k) vec(B) with xB(k+1) = A xB(k) + u(k)' (x) I.
    MatX<Scalar> phi(p * n_samples, n + n * m);
    MatX<Scalar> a_pow = MatX<Scalar>::Identity(n, n);
    MatX<Scalar> x_b = MatX<Scalar>::Zero(n, n * m);
    const MatX<Scalar> eye_n = MatX<Scalar>::Identity(n, n);
    for (Index k = 0; k < n_samples; ++k) {
        phi.middleRows(k * p, p).leftCols(n) = c_hat * a_pow;
        phi.middleRows(k * p, p).rightCols(n * m) = c_hat * x_b;
        MatX<Scalar> u_row = sim.U.col(k).transpose();
        x_b = a_hat * x_b + kron<Scalar>(u_row, eye_n);
        a_pow = a_hat * a_pow;
    }
    VecX<Scalar> rhs = vec<Scalar>(sim.Y);
    VecX<Scalar> sol = phi.colPivHouseholderQr().solve(rhs);
    MatX<Scalar> b_hat = unvec<Scalar>(sol.tail(n * m), n, m);

    out.ss = StateSpace<Scalar>{std::move(a_hat), std::move(b_hat), std::move(c_hat)};
    return out;
}

}  // namespace graybox
