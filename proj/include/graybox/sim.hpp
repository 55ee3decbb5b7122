#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "graybox/state_space.hpp"

namespace graybox {

/// Input/output record of one simulation. Y carries the measured (possibly
/// noisy) output; Y_clean is always the noise-free trajectory.
template <typename Scalar>
struct SimData {
    MatX<Scalar> U;        // m x N
    MatX<Scalar> Y;        // p x N
    MatX<Scalar> Y_clean;  // p x N
    std::optional<Scalar> snr_db;
};

/// x(k+1) = A x(k) + B u(k), y(k) = C x(k), from initial state x0.
template <typename Scalar>
SimData<Scalar> simulate(const StateSpace<Scalar>& ss, const MatX<Scalar>& u, const VecX<Scalar>& x0) {
    if (u.rows() != ss.m())
        throw std::invalid_argument("simulate: input row count must equal m");
    if (u.cols() < 1)
        throw std::invalid_argument("simulate: need at least one sample");
    if (x0.size() != ss.n())
        throw std::invalid_argument("simulate: x0 length must equal n");
    const Index n_samples = u.cols();
    MatX<Scalar> y(ss.p(), n_samples);
    VecX<Scalar> x = x0;
    for (Index k = 0; k < n_samples; ++k) {
        y.col(k) = ss.C * x;
        x = ss.A * x + ss.B * u.col(k);
    }
    return {u, y, y, std::nullopt};
}

template <typename Scalar>
SimData<Scalar> simulate(const StateSpace<Scalar>& ss, const MatX<Scalar>& u) {
    return simulate(ss, u, VecX<Scalar>::Zero(ss.n()));
}

/// White Gaussian measurement noise at a per-channel output SNR:
/// var(noise_ch) = var(Y_clean_ch) / 10^(snr_db/10), variances taken about
/// the channel mean. Reproducible under the seed; Y_clean is left untouched.
template <typename Scalar>
SimData<Scalar> add_noise(const SimData<Scalar>& sim, Scalar snr_db, std::uint64_t rng_seed) {
    if (sim.snr_db.has_value())
        throw std::invalid_argument("add_noise: input already carries noise");
    const Index p = sim.Y_clean.rows();
    const Index n_samples = sim.Y_clean.cols();
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SimData<Scalar> out = sim;
    out.snr_db = snr_db;
    for (Index ch = 0; ch < p; ++ch) {
        const Scalar mean = sim.Y_clean.row(ch).mean();
        const Scalar var =
            (sim.Y_clean.row(ch).array() - mean).square().sum() / Scalar(n_samples);
        if (!(var > Scalar(0)))
            throw DataError("add_noise: clean output channel has zero variance, SNR undefined");
        const Scalar sd = std::sqrt(var / std::pow(Scalar(10), snr_db / Scalar(10)));
        for (Index k = 0; k < n_samples; ++k)
            out.Y(ch, k) += sd * Scalar(gauss(rng));
    }
    return out;
}

/// Zero-mean unit-variance white Gaussian input, the experiment default.
template <typename Scalar>
MatX<Scalar> white_noise_input(Index m, Index n_samples, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatX<Scalar> u(m, n_samples);
    for (Index k = 0; k < n_samples; ++k)
        for (Index i = 0; i < m; ++i)
            u(i, k) = Scalar(gauss(rng));
    return u;
}

}  // namespace graybox
