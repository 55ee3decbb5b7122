#pragma once

#include "graybox/solvers.hpp"
#include "graybox/subspace.hpp"

namespace graybox {

enum class Method { nun, dcp, ami };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::nun: return "nun";
        case Method::dcp: return "dcp";
        case Method::ami: return "ami";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "nun") return Method::nun;
    if (s == "dcp") return Method::dcp;
    if (s == "ami") return Method::ami;
    throw ConfigError("unknown method: " + s);
}

/// Everything one identification run reports. theta/T are expressed in the
/// basis of the realization the caller handed in; warn-level diagnostics are
/// collected rather than printed.
template <typename Scalar>
struct IdentifyReport {
    VecX<Scalar> theta;
    MatX<Scalar> T;
    SolveStatus status = SolveStatus::converged;
    SolveTrace<Scalar> trace;  // empty for the plain NUN method

    VecX<Scalar> theta_nun;
    Scalar nun_sigma2_ratio = 0;
    int nun_inner_iterations = 0;

    Scalar final_sigma2_ratio = 0;
    Scalar cond_T = 0;
    int iterations = 0;
    bool canonicalized = false;
    std::vector<std::string> warnings;
};

namespace detail {

template <typename Scalar>
void collect_warnings(IdentifyReport<Scalar>& rep) {
    if (rep.status == SolveStatus::max_iters)
        rep.warnings.push_back("stopping rule not met within the iteration cap");
    if (rep.status == SolveStatus::degenerate)
        rep.warnings.push_back("rank-1 extraction degenerate at termination");
    if (rep.final_sigma2_ratio > Scalar(1e-2))
        rep.warnings.push_back("H is far from rank one (sigma2/sigma1 = " +
                               std::to_string(static_cast<double>(rep.final_sigma2_ratio)) +
                               "); the structure may be unidentifiable");
    if (rep.cond_T > Scalar(1e6))
        rep.warnings.push_back("similarity estimate is ill-conditioned (cond T = " +
                               std::to_string(static_cast<double>(rep.cond_T)) + ")");
}

}  // namespace detail

/// Recover theta from a realization already in hand. The realization is
/// first put in output-normal form (unless canonicalize = false or A-hat is
/// not Schur-stable), the NUN initialization computed, and the chosen method
/// run from it; T is mapped back to the caller's basis at the end.
template <typename Scalar>
IdentifyReport<Scalar> identify_realization(const ParametrizedStructure<Scalar>& s,
                                            const StateSpace<Scalar>& ss_hat, Method method,
                                            const SolverConfig& cfg, bool canonicalize = true) {
    IdentifyReport<Scalar> rep;
    NormalForm<Scalar> nf;
    if (canonicalize) {
        nf = output_normal_form(ss_hat);
        if (!nf.canonicalized)
            rep.warnings.push_back("realization left in its original basis (A-hat not Schur-stable)");
    } else {
        nf.ss = ss_hat;
        nf.S = MatX<Scalar>::Identity(ss_hat.n(), ss_hat.n());
    }
    rep.canonicalized = nf.canonicalized;

    LiftedProblem<Scalar> lp = build_lifted(s, nf.ss);
    NunResult<Scalar> nun = nun_solve(lp, cfg);
    rep.theta_nun = nun.theta;
    rep.nun_sigma2_ratio = nun.sigma2_ratio;
    rep.nun_inner_iterations = nun.inner_iterations;

    MatX<Scalar> t_canon;
    switch (method) {
        case Method::nun: {
            rep.theta = nun.theta;
            t_canon = nun.T;
            rep.status = nun.inner_converged ? SolveStatus::converged : SolveStatus::max_iters;
            rep.final_sigma2_ratio = nun.sigma2_ratio;
            rep.iterations = nun.inner_iterations;
            break;
        }
        case Method::dcp: {
            RefineResult<Scalar> res = dcp_solve(lp, nun.vars, cfg);
            rep.theta = res.theta;
            t_canon = res.T;
            rep.status = res.trace.status;
            rep.iterations = static_cast<int>(res.trace.iterations.size());
            rep.final_sigma2_ratio = res.trace.iterations.empty()
                                         ? nun.sigma2_ratio
                                         : res.trace.iterations.back().sigma2_ratio;
            rep.trace = std::move(res.trace);
            break;
        }
        case Method::ami: {
            AmiResult<Scalar> res = ami_solve(s, nf.ss, nun.theta, nun.T, cfg);
            rep.theta = res.theta;
            t_canon = res.T;
            rep.status = res.trace.status;
            rep.iterations = static_cast<int>(res.trace.iterations.size());
            rep.final_sigma2_ratio = Scalar(0);
            if (res.rank_warning)
                rep.warnings.push_back("rank-deficient least-squares step; minimum-norm solution used");
            rep.trace = std::move(res.trace);
            break;
        }
    }

    // Map the similarity back: T_user = T_canon * S^-1.
    rep.T = t_canon * nf.S.inverse();
    Eigen::JacobiSVD<MatX<Scalar>> svd_t(rep.T);
    const auto& tv = svd_t.singularValues();
    rep.cond_T = tv(tv.size() - 1) > Scalar(0) ? tv(0) / tv(tv.size() - 1)
                                               : std::numeric_limits<Scalar>::infinity();
    detail::collect_warnings(rep);
    return rep;
}

/// Full pipeline from input/output data: MOESP, then identify_realization.
template <typename Scalar>
IdentifyReport<Scalar> identify_data(const ParametrizedStructure<Scalar>& s,
                                     const SimData<Scalar>& data, SubspaceConfig sub_cfg,
                                     Method method, const SolverConfig& cfg) {
    if (sub_cfg.n == 0)
        sub_cfg.n = s.n;
    MoespResult<Scalar> mo = moesp(data, sub_cfg);
    IdentifyReport<Scalar> rep = identify_realization(s, mo.ss, method, cfg);
    if (mo.weak_gap)
        rep.warnings.push_back("weak singular-value gap at the requested order (ratio " +
                               std::to_string(static_cast<double>(mo.sv_gap_ratio)) + ")");
    return rep;
}

}  // namespace graybox
