// Copyright 2026 The pcfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pcfilter/filter.hpp"
#include "pcfilter/rng.hpp"
#include "pcfilter/sampling.hpp"

namespace pcf {

/**
 * One MCMR trajectory with Pauli-insertion noise.
 *
 * Requires circuit-trotter mode. After every controlled term rotation a
 * uniformly random non-identity Pauli hits a uniformly chosen involved qubit
 * (the ancilla or one of the term's support) with probability
 * depolarizing_2q; after each ancilla Hadamard the same happens on the
 * ancilla with depolarizing_1q. The ancilla reading flips with probability
 * readout_flip and a reading of 1 aborts. When cfg.shots > 0 each recorded
 * step carries a sampled energy with system readout flips.
 *
 * The noise stream is only consumed for nonzero probabilities, so a zero
 * NoiseModel reproduces run_filter in mcmr-sampled mode with the Trotter
 * propagator bit for bit.
 */
inline FilterTrace noisy_filter_trajectory(const StateVector &initial, const Hamiltonian &h,
                                           const SpectralData &s, const FilterConfig &cfg,
                                           const NoiseModel &noise) {
    if (cfg.mode != FilterMode::circuit_trotter) {
        throw std::invalid_argument("noisy_filter_trajectory: mode must be circuit-trotter");
    }
    noise.validate();
    return detail::run_filter_impl(initial, h, s, cfg, &noise);
}

/// Seed of trajectory `index` under a root seed.
inline std::uint64_t trajectory_seed(std::uint64_t root, std::uint64_t index) {
    return stream_seed(root, 1024 + index);
}

struct NoisyPoint {
    std::size_t step = 0;
    double mean_energy = std::numeric_limits<double>::quiet_NaN();
    double stderr_energy = std::numeric_limits<double>::quiet_NaN();
    double abort_rate = 0.0;
    std::size_t n_trajectories = 0; // survivors contributing to the mean
};

/**
 * Averages `trajectories` seeded runs. At each step the mean is taken over
 * trajectories that have not aborted, using their sampled energy (or the
 * exact energy of the trajectory state when cfg.shots == 0); the stderr is
 * the spread of those per-trajectory values over sqrt(count).
 */
inline std::vector<NoisyPoint> average_noisy_trajectories(const StateVector &initial,
                                                          const Hamiltonian &h,
                                                          const SpectralData &s,
                                                          FilterConfig cfg,
                                                          const NoiseModel &noise,
                                                          std::size_t trajectories,
                                                          std::uint64_t root_seed) {
    if (trajectories < 1) {
        throw InvalidSizeError("average_noisy_trajectories: need at least one trajectory");
    }
    const std::size_t steps = cfg.degree + 1;
    std::vector<double> sum(steps, 0.0);
    std::vector<double> sum_sq(steps, 0.0);
    std::vector<std::size_t> count(steps, 0);
    for (std::size_t t = 0; t < trajectories; ++t) {
        cfg.seed = trajectory_seed(root_seed, t);
        const auto trace = noisy_filter_trajectory(initial, h, s, cfg, noise);
        for (const auto &r : trace.records) {
            const double e = cfg.shots > 0 ? r.sampled_energy : r.energy;
            sum[r.step] += e;
            sum_sq[r.step] += e * e;
            ++count[r.step];
        }
    }
    std::vector<NoisyPoint> out(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        auto &p = out[k];
        p.step = k;
        p.n_trajectories = count[k];
        p.abort_rate = 1.0 - static_cast<double>(count[k]) / static_cast<double>(trajectories);
        if (count[k] == 0) {
            continue;
        }
        const double n = static_cast<double>(count[k]);
        p.mean_energy = sum[k] / n;
        if (count[k] > 1) {
            const double var = std::max(0.0, (sum_sq[k] - n * p.mean_energy * p.mean_energy) /
                                                 (n - 1.0));
            p.stderr_energy = std::sqrt(var / n);
        } else {
            p.stderr_energy = 0.0;
        }
    }
    return out;
}

} // namespace pcf
