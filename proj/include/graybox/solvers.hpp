#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "graybox/lifting.hpp"

namespace graybox {

struct SolverConfig {
    double lambda = 1e-3;        // nuclear-norm weight
    int max_iters = 100;         // outer iteration cap (DCP / AMI)
    double rel_tol = 1e-6;       // stopping rule on ||th_{k+1}-th_k|| / ||th_k||
    int inner_max_iters = 2000;  // convex-subproblem iterations
    double inner_tol = 1e-9;     // scaled primal/dual residual tolerance

    void check() const {
        if (lambda < 0)
            throw std::invalid_argument("solver: lambda must be nonnegative");
        if (rel_tol <= 0 || inner_tol <= 0)
            throw std::invalid_argument("solver: tolerances must be positive");
        if (max_iters < 1 || inner_max_iters < 1)
            throw std::invalid_argument("solver: iteration caps must be positive");
    }
};

enum class SolveStatus { converged, max_iters, degenerate };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max-iters";
        case SolveStatus::degenerate: return "degenerate";
    }
    return "?";
}

template <typename Scalar>
struct IterationRecord {
    int iter = 0;  // 1-based, counted after the initial point
    VecX<Scalar> theta;
    Scalar ls_part = 0;
    Scalar kyfan_penalty = 0;
    Scalar rel_change = 0;
    Scalar cond_T = 0;
    Scalar sigma2_ratio = 0;
};

template <typename Scalar>
struct SolveTrace {
    std::vector<IterationRecord<Scalar>> iterations;
    SolveStatus status = SolveStatus::max_iters;
};

/// Solver for the convex subproblems shared by the NUN initialization and the
/// sequential-convex-programming steps:
///
///   min_x  ||A x - b||_2^2  -  <L, H(x)>  +  lambda ||H(x)||_*
///
/// over x = (tau, vartheta, theta), where H(x) is affine with its bottom-left
/// entry pinned to 1. Solved by ADMM on the splitting Z = H(x): the x-update
/// is an exact linear solve through a cached Cholesky factor of 2A'A + rho I,
/// the Z-update is singular-value soft-thresholding at lambda/rho, and rho is
/// residual-balanced (with refactorization) when primal and dual residuals
/// drift apart. The returned point is the best iterate by objective value, so
/// warm starts are never worsened.
template <typename Scalar>
class ConvexSubproblem {
public:
    ConvexSubproblem(const LiftedProblem<Scalar>& lp, Scalar lambda)
        : n2_(lp.n * lp.n), q_(lp.q), dim_(n2_ * (q_ + 1) + q_), lambda_(lambda) {
        if (lambda < Scalar(0))
            throw std::invalid_argument("subproblem: lambda must be nonnegative");
        a_op_.resize(lp.rows(), dim_);
        for (Index i = 0; i <= q_; ++i)
            a_op_.middleCols(i * n2_, n2_) = lp.M_coeffs[static_cast<std::size_t>(i)];
        for (Index i = 0; i < q_; ++i)
            a_op_.col(n2_ * (q_ + 1) + i) = -lp.N_coeffs[static_cast<std::size_t>(i) + 1];
        b_ = lp.N_coeffs[0];
        gram2_ = Scalar(2) * a_op_.transpose() * a_op_;
        atb2_ = Scalar(2) * a_op_.transpose() * b_;
        set_rho(Scalar(1));
    }

    Index dimension() const { return dim_; }

    VecX<Scalar> flatten(const LiftedVariables<Scalar>& vars) const {
        VecX<Scalar> x(dim_);
        x.head(n2_) = vars.tau;
        x.segment(n2_, n2_ * q_) = vec<Scalar>(vars.vartheta);
        x.tail(q_) = vars.theta;
        return x;
    }

    LiftedVariables<Scalar> unflatten(const VecX<Scalar>& x) const {
        LiftedVariables<Scalar> vars;
        vars.tau = x.head(n2_);
        vars.vartheta = unvec<Scalar>(x.segment(n2_, n2_ * q_), n2_, q_);
        vars.theta = x.tail(q_);
        return vars;
    }

    /// Free entries of a full (n^2+1) x (q+1) matrix in x layout; the pinned
    /// bottom-left slot is skipped.
    VecX<Scalar> free_entries(const MatX<Scalar>& h) const {
        VecX<Scalar> x(dim_);
        x.head(n2_) = h.col(0).head(n2_);
        x.segment(n2_, n2_ * q_) = vec<Scalar>(MatX<Scalar>(h.topRightCorner(n2_, q_)));
        x.tail(q_) = h.row(n2_).tail(q_).transpose();
        return x;
    }

    MatX<Scalar> h_of(const VecX<Scalar>& x) const { return assemble_H(unflatten(x)); }

    Scalar objective(const VecX<Scalar>& x, const MatX<Scalar>* linear_term) const {
        Scalar val = (a_op_ * x - b_).squaredNorm();
        MatX<Scalar> h = h_of(x);
        Eigen::JacobiSVD<MatX<Scalar>> svd(h);
        val += lambda_ * svd.singularValues().sum();
        if (linear_term)
            val -= (linear_term->array() * h.array()).sum();
        return val;
    }

    struct Result {
        LiftedVariables<Scalar> vars;
        Scalar objective = 0;
        int iterations = 0;
        bool converged = false;
    };

    Result solve(const MatX<Scalar>* linear_term, const LiftedVariables<Scalar>* warm_start,
                 const SolverConfig& cfg) {
        VecX<Scalar> x = warm_start ? flatten(*warm_start) : VecX<Scalar>::Zero(dim_);
        VecX<Scalar> gl = VecX<Scalar>::Zero(dim_);
        if (linear_term)
            gl = free_entries(*linear_term);

        MatX<Scalar> z = h_of(x);
        MatX<Scalar> w = MatX<Scalar>::Zero(z.rows(), z.cols());
        MatX<Scalar> h = z;

        Result out;
        out.objective = objective(x, linear_term);
        VecX<Scalar> best_x = x;

        const Scalar tol = Scalar(cfg.inner_tol);
        for (int k = 0; k < cfg.inner_max_iters; ++k) {
            VecX<Scalar> rhs = atb2_ + gl + rho_ * free_entries(z - w);
            x = llt_.solve(rhs);
            h = h_of(x);

            MatX<Scalar> g = h + w;
            Eigen::JacobiSVD<MatX<Scalar>> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
            VecX<Scalar> sv =
                (svd.singularValues().array() - lambda_ / rho_).max(Scalar(0)).matrix();
            MatX<Scalar> z_new = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();

            const Scalar primal = (h - z_new).norm();
            const Scalar dual = rho_ * (z_new - z).norm();
            z = std::move(z_new);
            w += h - z;

            const Scalar val = objective(x, linear_term);
            if (!std::isfinite(val))
                throw NumericError("subproblem: non-finite objective at inner iteration " +
                                   std::to_string(k + 1));
            if (val < out.objective) {
                out.objective = val;
                best_x = x;
            }
            out.iterations = k + 1;

            const Scalar scale = std::max(Scalar(1), h.norm());
            if (primal <= tol * scale && dual <= tol * scale) {
                out.converged = true;
                break;
            }
            if ((k + 1) % 10 == 0) {
                if (primal > Scalar(10) * dual) {
                    set_rho(rho_ * Scalar(2));
                    w *= Scalar(0.5);
                } else if (dual > Scalar(10) * primal) {
                    set_rho(rho_ * Scalar(0.5));
                    w *= Scalar(2);
                }
            }
        }
        out.vars = unflatten(best_x);
        return out;
    }

private:
    void set_rho(Scalar rho) {
        rho_ = rho;
        MatX<Scalar> sys = gram2_;
        sys.diagonal().array() += rho_;
        llt_.compute(sys);
        if (llt_.info() != Eigen::Success)
            throw NumericError("subproblem: normal-equation factorization failed");
    }

    Index n2_, q_, dim_;
    Scalar lambda_;
    MatX<Scalar> a_op_;
    VecX<Scalar> b_;
    MatX<Scalar> gram2_;
    VecX<Scalar> atb2_;
    Scalar rho_ = 1;
    Eigen::LLT<MatX<Scalar>> llt_;
};

/// One-shot form of the subproblem solver.
template <typename Scalar>
LiftedVariables<Scalar> solve_convex_subproblem(const LiftedProblem<Scalar>& lp, Scalar lambda,
                                                const std::optional<MatX<Scalar>>& linear_term,
                                                const std::optional<LiftedVariables<Scalar>>& warm_start,
                                                const SolverConfig& cfg) {
    ConvexSubproblem<Scalar> solver(lp, lambda);
    return solver
        .solve(linear_term ? &*linear_term : nullptr, warm_start ? &*warm_start : nullptr, cfg)
        .vars;
}

template <typename Scalar>
struct NunResult {
    VecX<Scalar> theta;
    MatX<Scalar> T;
    LiftedVariables<Scalar> vars;
    Scalar sigma2_ratio = 0;
    Scalar cond_T = 0;
    int inner_iterations = 0;
    bool inner_converged = false;
};

/// Nuclear-norm initialization: the convex relaxation solved cold-started,
/// then rank-1 extraction. T is re-solved by least squares whenever the
/// extraction is not clean (sigma2/sigma1 above 1e-6).
template <typename Scalar>
NunResult<Scalar> nun_solve(const LiftedProblem<Scalar>& lp, const SolverConfig& cfg) {
    cfg.check();
    ConvexSubproblem<Scalar> solver(lp, Scalar(cfg.lambda));
    auto sol = solver.solve(nullptr, nullptr, cfg);
    ExtractResult<Scalar> ext = extract(assemble_H(sol.vars));

    NunResult<Scalar> out;
    out.theta = ext.theta;
    out.T = ext.T;
    out.vars = sol.vars;
    out.sigma2_ratio = ext.sigma2_ratio;
    out.cond_T = ext.cond_T;
    out.inner_iterations = sol.iterations;
    out.inner_converged = sol.converged;
    if (ext.sigma2_ratio > Scalar(1e-6))
        out.T = solve_T_least_squares(lp, out.theta);
    return out;
}

template <typename Scalar>
struct RefineResult {
    VecX<Scalar> theta;
    MatX<Scalar> T;
    SolveTrace<Scalar> trace;
};

/// Sequential convex programming on the DC objective
///   ||r||_2^2 + lambda (||H||_* - ||H||_2):
/// each step linearizes the concave part at the leading singular pair of the
/// current H and solves the resulting convex subproblem warm-started at the
/// current variables. Stops when the relative theta change drops below
/// cfg.rel_tol. The final T is re-solved by least squares at the final theta.
template <typename Scalar>
RefineResult<Scalar> dcp_solve(const LiftedProblem<Scalar>& lp, const LiftedVariables<Scalar>& init,
                               const SolverConfig& cfg) {
    cfg.check();
    ConvexSubproblem<Scalar> solver(lp, Scalar(cfg.lambda));
    LiftedVariables<Scalar> vars = init;
    MatX<Scalar> h = assemble_H(vars);

    VecX<Scalar> theta_prev;
    bool prev_valid = false;
    try {
        theta_prev = extract(h).theta;
        prev_valid = true;
    } catch (const ExtractionError&) {
        theta_prev = vars.theta;
    }

    RefineResult<Scalar> out;
    out.trace.status = SolveStatus::max_iters;
    bool last_degenerate = false;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        Eigen::JacobiSVD<MatX<Scalar>> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        MatX<Scalar> linear = Scalar(cfg.lambda) * svd.matrixU().col(0) *
                              svd.matrixV().col(0).transpose();
        auto sol = solver.solve(&linear, &vars, cfg);
        vars = sol.vars;
        h = assemble_H(vars);

        IterationRecord<Scalar> rec;
        rec.iter = k;
        last_degenerate = false;
        try {
            ExtractResult<Scalar> ext = extract(h);
            rec.theta = ext.theta;
            rec.cond_T = ext.cond_T;
            rec.sigma2_ratio = ext.sigma2_ratio;
        } catch (const ExtractionError&) {
            rec.theta = vars.theta;  // keep iterating on the raw variables
            rec.sigma2_ratio = std::numeric_limits<Scalar>::quiet_NaN();
            last_degenerate = true;
        }
        DcObjective<Scalar> obj = objective_dc(lp, vars, Scalar(cfg.lambda));
        rec.ls_part = obj.ls_part;
        rec.kyfan_penalty = obj.kyfan_penalty;

        const Scalar denom = theta_prev.norm();
        rec.rel_change = denom > Scalar(0)
                             ? (rec.theta - theta_prev).norm() / denom
                             : (rec.theta - theta_prev).norm();
        out.trace.iterations.push_back(rec);

        if (prev_valid && !last_degenerate && rec.rel_change <= Scalar(cfg.rel_tol)) {
            out.trace.status = SolveStatus::converged;
            theta_prev = rec.theta;
            break;
        }
        theta_prev = rec.theta;
        prev_valid = !last_degenerate;
    }
    if (last_degenerate)
        out.trace.status = SolveStatus::degenerate;

    out.theta = theta_prev;
    out.T = solve_T_least_squares(lp, out.theta);
    return out;
}

/// Alternating minimization of the Eq. 4 objective h(theta, T): an exact
/// linear least-squares step in theta at fixed T, then in vec(T) at fixed
/// theta. Same stopping rule and cap as the DCP. Rank-deficient steps fall
/// back to the minimum-norm solution and are flagged in rank_warning.
template <typename Scalar>
struct AmiResult : RefineResult<Scalar> {
    bool rank_warning = false;
};

template <typename Scalar>
AmiResult<Scalar> ami_solve(const ParametrizedStructure<Scalar>& s, const StateSpace<Scalar>& ss_hat,
                            const VecX<Scalar>& theta0, const MatX<Scalar>& t0,
                            const SolverConfig& cfg) {
    cfg.check();
    LiftedProblem<Scalar> lp = build_lifted(s, ss_hat);
    const Index n = s.n, q = s.q;
    const Index rows = lp.rows();

    AmiResult<Scalar> out;
    out.trace.status = SolveStatus::max_iters;
    VecX<Scalar> theta = theta0;
    MatX<Scalar> t = t0;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        // theta step: h is affine in theta at fixed T.
        MatX<Scalar> g(rows, q);
        VecX<Scalar> d(rows);
        {
            MatX<Scalar> da = t * ss_hat.A - s.A_coeffs[0] * t;
            MatX<Scalar> db = t * ss_hat.B - s.B_coeffs[0];
            MatX<Scalar> dc = ss_hat.C - s.C_coeffs[0] * t;
            d.head(n * n) = vec<Scalar>(da);
            d.segment(n * n, n * s.m) = vec<Scalar>(db);
            d.tail(s.p * n) = vec<Scalar>(dc);
            for (Index i = 0; i < q; ++i) {
                MatX<Scalar> ga = s.A_coeffs[static_cast<std::size_t>(i) + 1] * t;
                MatX<Scalar> gc = s.C_coeffs[static_cast<std::size_t>(i) + 1] * t;
                g.col(i).head(n * n) = vec<Scalar>(ga);
                g.col(i).segment(n * n, n * s.m) = vec<Scalar>(s.B_coeffs[static_cast<std::size_t>(i) + 1]);
                g.col(i).tail(s.p * n) = vec<Scalar>(gc);
            }
        }
        Eigen::CompleteOrthogonalDecomposition<MatX<Scalar>> cod(g);
        if (cod.rank() < q)
            out.rank_warning = true;
        VecX<Scalar> theta_new = cod.solve(d);

        // T step: linear least squares through the lifted coefficients.
        bool t_rank_deficient = false;
        t = solve_T_least_squares(lp, theta_new, &t_rank_deficient);
        out.rank_warning = out.rank_warning || t_rank_deficient;

        IterationRecord<Scalar> rec;
        rec.iter = k;
        rec.theta = theta_new;
        rec.ls_part = objective_h(s, ss_hat, theta_new, t);
        rec.kyfan_penalty = Scalar(0);  // H built from (tau, tau theta') is rank-1 exactly
        rec.sigma2_ratio = Scalar(0);
        Eigen::JacobiSVD<MatX<Scalar>> svd_t(t);
        const auto& tv = svd_t.singularValues();
        rec.cond_T = tv(tv.size() - 1) > Scalar(0)
                         ? tv(0) / tv(tv.size() - 1)
                         : std::numeric_limits<Scalar>::infinity();
        const Scalar denom = theta.norm();
        rec.rel_change = denom > Scalar(0) ? (theta_new - theta).norm() / denom
                                           : (theta_new - theta).norm();
        out.trace.iterations.push_back(rec);
        theta = theta_new;
        if (rec.rel_change <= Scalar(cfg.rel_tol)) {
            out.trace.status = SolveStatus::converged;
            break;
        }
    }
    out.theta = theta;
    out.T = t;
    return out;
}

}  // namespace graybox
