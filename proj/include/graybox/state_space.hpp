#pragma once

#include <vector>

#include "graybox/types.hpp"

namespace graybox {

/// A concrete (A, B, C) realization. Output equation has no feedthrough.
template <typename Scalar>
struct StateSpace {
    MatX<Scalar> A;  // n x n
    MatX<Scalar> B;  // n x m
    MatX<Scalar> C;  // p x n

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index p() const { return C.rows(); }
};

/// Affinely parametrized model family: A(theta) = A0 + sum_i theta_i * Ai,
/// and likewise for B, C. Coefficient lists hold q+1 matrices each.
template <typename Scalar>
struct ParametrizedStructure {
    Index n = 0, m = 0, p = 0, q = 0;
    std::vector<MatX<Scalar>> A_coeffs;  // q+1 of n x n
    std::vector<MatX<Scalar>> B_coeffs;  // q+1 of n x m
    std::vector<MatX<Scalar>> C_coeffs;  // q+1 of p x n
};

/// Shape checks (throws) plus soft diagnostics (returned as messages).
template <typename Scalar>
std::vector<std::string> validate(const ParametrizedStructure<Scalar>& s) {
    if (s.n < 1 || s.m < 1 || s.p < 1)
        throw std::invalid_argument("structure: dimensions must be positive");
    if (s.q < 1)
        throw std::invalid_argument("structure: q must be >= 1");
    const auto count = static_cast<std::size_t>(s.q) + 1;
    if (s.A_coeffs.size() != count || s.B_coeffs.size() != count || s.C_coeffs.size() != count)
        throw std::invalid_argument("structure: coefficient lists must hold q+1 matrices");
    for (const auto& a : s.A_coeffs)
        if (a.rows() != s.n || a.cols() != s.n)
            throw std::invalid_argument("structure: A coefficient shape mismatch");
    for (const auto& b : s.B_coeffs)
        if (b.rows() != s.n || b.cols() != s.m)
            throw std::invalid_argument("structure: B coefficient shape mismatch");
    for (const auto& c : s.C_coeffs)
        if (c.rows() != s.p || c.cols() != s.n)
            throw std::invalid_argument("structure: C coefficient shape mismatch");

    std::vector<std::string> warnings;
    if (s.q >= s.n * (s.p + s.m))
        warnings.push_back("structure has q >= n(p+m) parameters and cannot be identifiable");
    return warnings;
}

template <typename Scalar>
StateSpace<Scalar> evaluate(const ParametrizedStructure<Scalar>& s, const VecX<Scalar>& theta) {
    if (theta.size() != s.q)
        throw std::invalid_argument("evaluate: theta length must equal q");
    StateSpace<Scalar> ss{s.A_coeffs[0], s.B_coeffs[0], s.C_coeffs[0]};
    for (Index i = 0; i < s.q; ++i) {
        ss.A += theta[i] * s.A_coeffs[static_cast<std::size_t>(i) + 1];
        ss.B += theta[i] * s.B_coeffs[static_cast<std::size_t>(i) + 1];
        ss.C += theta[i] * s.C_coeffs[static_cast<std::size_t>(i) + 1];
    }
    return ss;
}

/// Largest eigenvalue magnitude of A; a stability diagnostic, not enforced.
template <typename Scalar>
Scalar spectral_radius(const MatX<Scalar>& a) {
    Eigen::EigenSolver<MatX<Scalar>> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Output-normal form: similarity S with Wo(S^-1 A S, C S) = I, where Wo
/// solves the discrete Lyapunov equation Wo = A' Wo A + C' C. Normalizing
/// the realization this way makes the downstream lifted problem independent
/// of the (arbitrary) basis of the input realization. Requires a Schur-stable
/// A; callers fall back to the raw realization otherwise.
template <typename Scalar>
struct NormalForm {
    StateSpace<Scalar> ss;
    MatX<Scalar> S;          // original = canonical basis change, A_canon = S^-1 A S
    bool canonicalized = false;
};

template <typename Scalar>
MatX<Scalar> solve_discrete_lyapunov(const MatX<Scalar>& a, const MatX<Scalar>& rhs) {
    // X = A X A' + Q via the n^2 x n^2 Kronecker system; fine at desk scale.
    const Index n = a.rows();
    MatX<Scalar> sys = MatX<Scalar>::Identity(n * n, n * n) - kron<Scalar>(a, a);
    VecX<Scalar> x = sys.partialPivLu().solve(vec<Scalar>(rhs));
    MatX<Scalar> out = unvec<Scalar>(x, n, n);
    return Scalar(0.5) * (out + out.transpose());
}

template <typename Scalar>
NormalForm<Scalar> output_normal_form(const StateSpace<Scalar>& ss) {
    const Index n = ss.n();
    NormalForm<Scalar> nf{ss, MatX<Scalar>::Identity(n, n), false};
    if (!(spectral_radius<Scalar>(ss.A) < Scalar(1)))
        return nf;
    MatX<Scalar> wo = solve_discrete_lyapunov<Scalar>(ss.A.transpose(), ss.C.transpose() * ss.C);
    Eigen::SelfAdjointEigenSolver<MatX<Scalar>> es(wo);
    if (es.eigenvalues().minCoeff() <= Scalar(0))
        return nf;  // numerically unobservable; leave realization as-is
    // Wo = L L' with L = V diag(sqrt(w)); S = L^-T gives S' Wo S = I.
    MatX<Scalar> l = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal();
    MatX<Scalar> s = l.transpose().inverse();
    MatX<Scalar> si = l.transpose();
    nf.ss = StateSpace<Scalar>{si * ss.A * s, si * ss.B, ss.C * s};
    nf.S = s;
    nf.canonicalized = true;
    return nf;
}

}  // namespace graybox
