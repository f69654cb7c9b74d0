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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pcfilter/errors.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/rng.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf {

/// One measurement setting: terms that commute qubit-wise, read out together.
struct MeasurementGroup {
    std::vector<std::size_t> terms; // indices into Hamiltonian::terms()
    std::vector<Pauli> basis;       // per qubit; I = not measured
    std::size_t shots = 0;
};

struct ShotPlan {
    std::size_t shots = 0;
    std::vector<MeasurementGroup> groups;
};

struct SampledEnergy {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Parametric Pauli-insertion noise.
struct NoiseModel {
    double depolarizing_2q = 5e-3; // per controlled term rotation
    double depolarizing_1q = 2e-4; // per single-qubit gate
    double readout_flip = 1e-2;    // per measured qubit

    static NoiseModel none() { return {0.0, 0.0, 0.0}; }

    [[nodiscard]] bool is_zero() const {
        return depolarizing_2q == 0.0 && depolarizing_1q == 0.0 && readout_flip == 0.0;
    }

    void validate() const {
        for (double p : {depolarizing_2q, depolarizing_1q, readout_flip}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidSizeError("NoiseModel: probabilities must lie in [0, 1]");
            }
        }
    }
};

namespace detail {

inline bool qubitwise_compatible(const std::vector<Pauli> &basis, const PauliString &s) {
    for (std::size_t q = 0; q < basis.size(); ++q) {
        if (s[q] != Pauli::I && basis[q] != Pauli::I && s[q] != basis[q]) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/**
 * Greedy first-fit grouping into qubit-wise commuting settings.
 *
 * Shots are split in proportion to each group's sum of |coefficients|
 * (floored); the remainder goes to the heaviest group.
 */
inline ShotPlan plan_measurements(const Hamiltonian &h, std::size_t shots) {
    if (shots < 1) {
        throw PlanError("plan_measurements: shots must be >= 1");
    }
    ShotPlan plan;
    plan.shots = shots;
    const std::size_t n = h.qubit_count();
    for (std::size_t t = 0; t < h.size(); ++t) {
        const auto &s = h.terms()[t].string;
        auto it = std::find_if(plan.groups.begin(), plan.groups.end(), [&](const auto &g) {
            return detail::qubitwise_compatible(g.basis, s);
        });
        if (it == plan.groups.end()) {
            plan.groups.push_back({{}, std::vector<Pauli>(n, Pauli::I), 0});
            it = std::prev(plan.groups.end());
        }
        it->terms.push_back(t);
        for (std::size_t q = 0; q < n; ++q) {
            if (s[q] != Pauli::I) {
                it->basis[q] = s[q];
            }
        }
    }
    if (plan.groups.empty()) {
        return plan;
    }

    std::vector<double> weight(plan.groups.size(), 0.0);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        for (auto t : plan.groups[g].terms) {
            weight[g] += std::abs(h.terms()[t].coefficient);
        }
    }
    double total = 0.0;
    for (double w : weight) {
        total += w;
    }
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        const double share = static_cast<double>(shots) * weight[g] / total;
        plan.groups[g].shots = static_cast<std::size_t>(std::floor(share));
        assigned += plan.groups[g].shots;
    }
    const auto heaviest = static_cast<std::size_t>(
        std::distance(weight.begin(), std::max_element(weight.begin(), weight.end())));
    plan.groups[heaviest].shots += shots - assigned;
    return plan;
}

namespace detail {

/// Rotates `state` so that the group's basis reads out in Z.
inline void rotate_to_basis(StateVector &state, const std::vector<Pauli> &basis) {
    for (std::size_t q = 0; q < basis.size(); ++q) {
        switch (basis[q]) {
        case Pauli::X: apply_gate(state, q, gates::hadamard); break;
        case Pauli::Y:
            apply_gate(state, q, gates::s_dagger);
            apply_gate(state, q, gates::hadamard);
            break;
        default: break;
        }
    }
}

} // namespace detail

/**
 * Shot-noise energy estimate.
 *
 * Each group is sampled independently from the exact outcome distribution of
 * the rotated state; the stderr combines the per-group standard errors in
 * quadrature. With `readout_flip` > 0 each measured bit is flipped with that
 * probability, drawing from the seed's noise stream (untouched otherwise).
 */
inline SampledEnergy sample_energy(const StateVector &state, const Hamiltonian &h,
                                   const ShotPlan &plan, std::uint64_t seed,
                                   double readout_flip = 0.0) {
    detail::require_register(state, h.qubit_count(), "sample_energy");
    detail::require_nondegenerate(state, "sample_energy");
    Rng shots_rng(stream_seed(seed, StreamId::shots));
    Rng flip_rng(stream_seed(seed, StreamId::noise));

    SampledEnergy result;
    double var_total = 0.0;
    const std::size_t dim = state.dimension();
    std::vector<double> cdf(dim);
    std::vector<std::uint64_t> counts(dim);
    for (const auto &group : plan.groups) {
        if (group.terms.empty()) {
            continue;
        }
        if (group.shots == 0) {
            throw PlanError("sample_energy: measurement group with zero shots");
        }
        std::uint64_t measured = 0;
        for (std::size_t q = 0; q < group.basis.size(); ++q) {
            if (group.basis[q] != Pauli::I) {
                measured |= std::uint64_t{1} << q;
            }
        }
        StateVector rotated = state;
        detail::rotate_to_basis(rotated, group.basis);
        double acc = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            acc += std::norm(rotated[b]);
            cdf[b] = acc;
        }
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < group.shots; ++s) {
            const double u = shots_rng.uniform() * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            std::size_t b = std::min<std::size_t>(
                static_cast<std::size_t>(std::distance(cdf.begin(), it)), dim - 1);
            if (readout_flip > 0.0) {
                for (std::uint64_t m = measured; m != 0; m &= m - 1) {
                    if (flip_rng.uniform() < readout_flip) {
                        b ^= m & (~m + 1);
                    }
                }
            }
            ++counts[b];
        }

        std::vector<double> g(dim, 0.0);
        const double n = static_cast<double>(group.shots);
        double mean = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            if (counts[b] == 0) {
                continue;
            }
            for (auto t : group.terms) {
                const auto &term = h.terms()[t];
                const bool odd = std::popcount(b & term.string.support_mask()) & 1;
                g[b] += odd ? -term.coefficient : term.coefficient;
            }
            mean += (static_cast<double>(counts[b]) / n) * g[b];
        }
        double ss = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            if (counts[b] != 0) {
                const double dev = g[b] - mean;
                ss += static_cast<double>(counts[b]) * dev * dev;
            }
        }
        result.mean += mean;
        if (group.shots > 1) {
            var_total += ss / (n - 1.0) / n;
        }
    }
    result.standard_error = std::sqrt(var_total);
    return result;
}

} // namespace pcf
