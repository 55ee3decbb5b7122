#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graybox/identify.hpp"

namespace graybox {

/// One Monte-Carlo campaign: a structure with known true parameters, an SNR
/// grid (nullopt = noise-free), and the methods to compare. Every method in a
/// trial refines the same NUN initial point.
struct ExperimentPlan {
    ParametrizedStructure<double> structure;
    VecX<double> theta_star;
    std::string structure_name = "inline";
    std::vector<std::optional<double>> snr_grid_db;
    int trials = 50;
    int samples = 400;
    int burn_in = -1;  // negative = structure order n
    SubspaceConfig subspace;
    SolverConfig solver;
    std::vector<Method> methods{Method::nun, Method::dcp, Method::ami};
    std::uint64_t base_seed = 1;
    int jobs = 0;  // 0 = hardware concurrency

    void check() const;
};

struct MethodOutcome {
    Method method = Method::dcp;
    VecX<double> theta;
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
    double cond_T = 0;
    double sigma2_ratio = 0;
    double seconds = 0;
    bool failed = false;
    std::string error;
};

struct TrialRecord {
    int snr_index = 0;
    std::optional<double> snr_db;
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<MethodOutcome> outcomes;
    bool failed = false;  // trial-level failure (simulation/subspace stage)
    std::string error;
};

struct AggregateRow {
    std::optional<double> snr_db;
    Method method = Method::dcp;
    double rnmse = 0;
    int trials_used = 0;
};

struct ExperimentResult {
    std::vector<TrialRecord> trials;
    std::vector<AggregateRow> aggregate;
};

struct TracePoint {
    Method method = Method::dcp;
    int iter = 0;
    double rel_err = 0;
    double ls_part = 0;
    double kyfan_penalty = 0;
};

/// sqrt( (1/K) sum_i ||th_i - th*||^2 / ||th*||^2 )
double rnmse(const std::vector<VecX<double>>& estimates, const VecX<double>& theta_star);

/// Deterministic per-trial seed: base_seed mixed with the (snr, trial) cell
/// through SplitMix64, so any single trial reproduces in isolation.
std::uint64_t trial_seed(std::uint64_t base_seed, int snr_index, int trial);

ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Per-iteration error and objective traces for a single (snr, trial) cell;
/// records start at iteration 1, after the shared initial point.
std::vector<TracePoint> iteration_trace_experiment(const ExperimentPlan& plan);

}  // namespace graybox
