#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "graybox/state_space.hpp"

namespace graybox {

/// Coefficients of the vectorized similarity equations M(theta) vec(T) = N(theta):
///   M(theta) = [ A-hat' (x) I  -  I (x) A(theta) ;  B-hat' (x) I ;  I (x) C(theta) ]
///   N(theta) = [ 0 ; vec(B(theta)) ; vec(C-hat) ]
/// expanded affinely as M(theta) = M0 + sum_i theta_i Mi, likewise N.
template <typename Scalar>
struct LiftedProblem {
    std::vector<MatX<Scalar>> M_coeffs;  // q+1 of (n^2+mn+pn) x n^2
    std::vector<VecX<Scalar>> N_coeffs;  // q+1 of n^2+mn+pn
    Index n = 0, m = 0, p = 0, q = 0;

    Index rows() const { return n * n + m * n + p * n; }
};

/// The over-parametrized unknowns: tau = vec(T), the q redundant columns
/// vartheta_i (= tau * theta_i at consistency), and theta itself.
template <typename Scalar>
struct LiftedVariables {
    VecX<Scalar> tau;       // n^2
    MatX<Scalar> vartheta;  // n^2 x q
    VecX<Scalar> theta;     // q

    static LiftedVariables Zero(Index n, Index q) {
        return {VecX<Scalar>::Zero(n * n), MatX<Scalar>::Zero(n * n, q), VecX<Scalar>::Zero(q)};
    }
};

template <typename Scalar>
LiftedProblem<Scalar> build_lifted(const ParametrizedStructure<Scalar>& s,
                                   const StateSpace<Scalar>& ss_hat) {
    if (ss_hat.n() != s.n || ss_hat.m() != s.m || ss_hat.p() != s.p)
        throw std::invalid_argument("build_lifted: realization dimensions do not match the structure");
    const Index n = s.n, m = s.m, p = s.p, q = s.q;
    const MatX<Scalar> eye = MatX<Scalar>::Identity(n, n);

    LiftedProblem<Scalar> lp;
    lp.n = n; lp.m = m; lp.p = p; lp.q = q;
    lp.M_coeffs.reserve(static_cast<std::size_t>(q) + 1);
    lp.N_coeffs.reserve(static_cast<std::size_t>(q) + 1);

    MatX<Scalar> m0(lp.rows(), n * n);
    m0.topRows(n * n) = kron<Scalar>(ss_hat.A.transpose(), eye) - kron<Scalar>(eye, s.A_coeffs[0]);
    m0.middleRows(n * n, m * n) = kron<Scalar>(ss_hat.B.transpose(), eye);
    m0.bottomRows(p * n) = kron<Scalar>(eye, s.C_coeffs[0]);
    lp.M_coeffs.push_back(std::move(m0));

    VecX<Scalar> n0 = VecX<Scalar>::Zero(lp.rows());
    n0.segment(n * n, m * n) = vec<Scalar>(s.B_coeffs[0]);
    n0.tail(p * n) = vec<Scalar>(ss_hat.C);
    lp.N_coeffs.push_back(std::move(n0));

    for (Index i = 1; i <= q; ++i) {
        MatX<Scalar> mi = MatX<Scalar>::Zero(lp.rows(), n * n);
        mi.topRows(n * n) = -kron<Scalar>(eye, s.A_coeffs[static_cast<std::size_t>(i)]);
        mi.bottomRows(p * n) = kron<Scalar>(eye, s.C_coeffs[static_cast<std::size_t>(i)]);
        lp.M_coeffs.push_back(std::move(mi));

        VecX<Scalar> ni = VecX<Scalar>::Zero(lp.rows());
        ni.segment(n * n, m * n) = vec<Scalar>(s.B_coeffs[static_cast<std::size_t>(i)]);
        lp.N_coeffs.push_back(std::move(ni));
    }
    return lp;
}

template <typename Scalar>
MatX<Scalar> m_at(const LiftedProblem<Scalar>& lp, const VecX<Scalar>& theta) {
    MatX<Scalar> m = lp.M_coeffs[0];
    for (Index i = 0; i < lp.q; ++i)
        m += theta[i] * lp.M_coeffs[static_cast<std::size_t>(i) + 1];
    return m;
}

template <typename Scalar>
VecX<Scalar> n_at(const LiftedProblem<Scalar>& lp, const VecX<Scalar>& theta) {
    VecX<Scalar> v = lp.N_coeffs[0];
    for (Index i = 0; i < lp.q; ++i)
        v += theta[i] * lp.N_coeffs[static_cast<std::size_t>(i) + 1];
    return v;
}

/// M0 tau + sum_i Mi vartheta_i - N0 - sum_i theta_i Ni. Zero exactly when
/// the similarity equations hold and vartheta_i = tau theta_i.
template <typename Scalar>
VecX<Scalar> residual(const LiftedProblem<Scalar>& lp, const LiftedVariables<Scalar>& vars) {
    VecX<Scalar> r = lp.M_coeffs[0] * vars.tau - lp.N_coeffs[0];
    for (Index i = 0; i < lp.q; ++i) {
        r += lp.M_coeffs[static_cast<std::size_t>(i) + 1] * vars.vartheta.col(i);
        r -= vars.theta[i] * lp.N_coeffs[static_cast<std::size_t>(i) + 1];
    }
    return r;
}

/// H = [ tau  vartheta_1 ... vartheta_q ;
///        1    theta_1   ...  theta_q  ]   of size (n^2+1) x (q+1).
template <typename Scalar>
MatX<Scalar> assemble_H(const LiftedVariables<Scalar>& vars) {
    const Index n2 = vars.tau.size();
    const Index q = vars.theta.size();
    MatX<Scalar> h(n2 + 1, q + 1);
    h.col(0).head(n2) = vars.tau;
    h(n2, 0) = Scalar(1);
    h.topRightCorner(n2, q) = vars.vartheta;
    h.row(n2).tail(q) = vars.theta.transpose();
    return h;
}

template <typename Scalar>
LiftedVariables<Scalar> variables_from_H(const MatX<Scalar>& h) {
    const Index n2 = h.rows() - 1;
    const Index q = h.cols() - 1;
    LiftedVariables<Scalar> vars;
    vars.tau = h.col(0).head(n2);
    vars.vartheta = h.topRightCorner(n2, q);
    vars.theta = h.row(n2).tail(q).transpose();
    return vars;
}

template <typename Scalar>
struct ExtractResult {
    VecX<Scalar> theta;
    MatX<Scalar> T;
    Scalar sigma2_ratio = 0;  // sigma_2 / sigma_1 of H, rank-1 fidelity
    Scalar cond_T = 0;
    bool top_pair_tie = false;  // sigma_1 - sigma_2 below tie tolerance
};

/// Rank-1 recovery of (theta, T) from H. The best rank-1 approximation
/// sigma_1 u1 v1' factors as alpha [tau;1] (1/alpha) [1, theta']; normalizing
/// its bottom-left entry to 1 cancels alpha regardless of SVD sign choices.
template <typename Scalar>
ExtractResult<Scalar> extract(const MatX<Scalar>& h) {
    const Index n2 = h.rows() - 1;
    const Index n = static_cast<Index>(std::round(std::sqrt(static_cast<double>(n2))));
    if (n * n != n2)
        throw std::invalid_argument("extract: H row count must be n^2 + 1");
    const Index q = h.cols() - 1;

    Eigen::JacobiSVD<MatX<Scalar>> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecX<Scalar>& sv = svd.singularValues();
    if (!(sv(0) > Scalar(0)))
        throw ExtractionError("extract: H is numerically zero");
    VecX<Scalar> u1 = svd.matrixU().col(0);
    VecX<Scalar> v1 = svd.matrixV().col(0);

    // Bottom-left entry of the rank-1 approximation, relative to sigma_1.
    const Scalar pivot = u1(n2) * v1(0);
    if (std::abs(pivot) < Scalar(1e-8))
        throw ExtractionError("extract: degenerate normalization, scalar ambiguity unresolved");

    ExtractResult<Scalar> out;
    out.theta = v1.tail(q) / v1(0);
    VecX<Scalar> tau = u1.head(n2) / u1(n2);
    out.T = unvec<Scalar>(tau, n, n);
    out.sigma2_ratio = sv.size() > 1 ? sv(1) / sv(0) : Scalar(0);
    out.top_pair_tie = sv.size() > 1 && (sv(0) - sv(1)) < Scalar(1e-10) * sv(0);

    Eigen::JacobiSVD<MatX<Scalar>> svd_t(out.T);
    const auto& tv = svd_t.singularValues();
    out.cond_T = tv(tv.size() - 1) > Scalar(0)
                     ? tv(0) / tv(tv.size() - 1)
                     : std::numeric_limits<Scalar>::infinity();
    return out;
}

/// Eq. 4 objective: ||T A-hat - A(th) T||_F^2 + ||T B-hat - B(th)||_F^2
///                  + ||C-hat - C(th) T||_F^2.
template <typename Scalar>
Scalar objective_h(const ParametrizedStructure<Scalar>& s, const StateSpace<Scalar>& ss_hat,
                   const VecX<Scalar>& theta, const MatX<Scalar>& t) {
    StateSpace<Scalar> model = evaluate(s, theta);
    return (t * ss_hat.A - model.A * t).squaredNorm() + (t * ss_hat.B - model.B).squaredNorm() +
           (ss_hat.C - model.C * t).squaredNorm();
}

template <typename Scalar>
struct DcObjective {
    Scalar total = 0;
    Scalar ls_part = 0;        // squared residual norm
    Scalar kyfan_penalty = 0;  // nuclear norm minus spectral norm of H
};

/// Truncated-nuclear-norm objective: ||r||_2^2 + lambda (||H||_* - ||H||_2).
template <typename Scalar>
DcObjective<Scalar> objective_dc(const LiftedProblem<Scalar>& lp, const LiftedVariables<Scalar>& vars,
                                 Scalar lambda) {
    if (lambda < Scalar(0))
        throw std::invalid_argument("objective_dc: lambda must be nonnegative");
    DcObjective<Scalar> out;
    out.ls_part = residual(lp, vars).squaredNorm();
    Eigen::JacobiSVD<MatX<Scalar>> svd(assemble_H(vars));
    const auto& sv = svd.singularValues();
    out.kyfan_penalty = sv.sum() - sv(0);
    out.total = out.ls_part + lambda * out.kyfan_penalty;
    return out;
}

/// Re-solves T by least squares on M(theta) vec(T) = N(theta) at fixed theta.
/// Used to polish T after rank-1 extraction; minimum-norm when rank-deficient.
template <typename Scalar>
MatX<Scalar> solve_T_least_squares(const LiftedProblem<Scalar>& lp, const VecX<Scalar>& theta,
                                   bool* rank_deficient = nullptr) {
    MatX<Scalar> m = m_at(lp, theta);
    Eigen::CompleteOrthogonalDecomposition<MatX<Scalar>> cod(m);
    if (rank_deficient)
        *rank_deficient = cod.rank() < lp.n * lp.n;
    VecX<Scalar> tau = cod.solve(n_at(lp, theta));
    return unvec<Scalar>(tau, lp.n, lp.n);
}

}  // namespace graybox
