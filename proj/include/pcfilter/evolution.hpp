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
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcfilter/errors.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/spectral.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf {

struct TrotterConfig {
    int order = 2;              // 1: fixed term order, 2: symmetrized
    std::size_t substeps = 8;   // slices per evolution window

    void validate() const {
        if (order != 1 && order != 2) {
            throw InvalidSizeError("TrotterConfig: order must be 1 or 2");
        }
        if (substeps < 1) {
            throw InvalidSizeError("TrotterConfig: substeps must be >= 1");
        }
    }
};

namespace detail {

/**
 * In-place e^{-i theta P} on amplitudes whose index contains every bit of
 * `control` (pass 0 for an uncontrolled rotation). Uses
 * e^{-i theta P} = cos(theta) I - i sin(theta) P.
 */
inline void rotate_pauli(std::span<complex_t> amps, const PauliMasks &m, double theta,
                         std::uint64_t control = 0) {
    const double c = std::cos(theta);
    const complex_t mis{0.0, -std::sin(theta)};
    if (m.flip == 0) {
        for (std::size_t b = 0; b < amps.size(); ++b) {
            if ((b & control) != control) {
                continue;
            }
            amps[b] *= c + mis * m.phase_of(b);
        }
        return;
    }
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const std::size_t partner = b ^ m.flip;
        if (partner < b || (b & control) != control) {
            continue;
        }
        const complex_t lo = amps[b];
        const complex_t hi = amps[partner];
        // (P psi)[b] = phase(partner) psi[partner]
        amps[b] = c * lo + mis * m.phase_of(partner) * hi;
        amps[partner] = c * hi + mis * m.phase_of(b) * lo;
    }
}

/// Called after each term rotation: (term index, control mask).
using RotationHook = std::function<void(std::size_t, std::uint64_t)>;

/**
 * Trotter product for duration t applied to `amps`, optionally controlled.
 * Order 2 runs the term list forward then backward with half steps.
 */
inline void trotter_product(std::span<complex_t> amps, const Hamiltonian &h, double t,
                            const TrotterConfig &cfg, std::uint64_t control = 0,
                            const RotationHook &hook = {}) {
    cfg.validate();
    const auto &terms = h.terms();
    std::vector<PauliMasks> masks;
    masks.reserve(terms.size());
    for (const auto &term : terms) {
        masks.push_back(term.string.masks());
    }
    const double dt = t / static_cast<double>(cfg.substeps);
    auto step = [&](std::size_t j, double len) {
        rotate_pauli(amps, masks[j], terms[j].coefficient * len, control);
        if (hook) {
            hook(j, control);
        }
    };
    for (std::size_t s = 0; s < cfg.substeps; ++s) {
        if (cfg.order == 1) {
            for (std::size_t j = 0; j < terms.size(); ++j) {
                step(j, dt);
            }
        } else {
            for (std::size_t j = 0; j < terms.size(); ++j) {
                step(j, 0.5 * dt);
            }
            for (std::size_t j = terms.size(); j-- > 0;) {
                step(j, 0.5 * dt);
            }
        }
    }
}

inline void exact_evolve_inplace(std::span<complex_t> amps, const SpectralData &s, double t) {
    auto c = s.components(amps);
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] *= std::polar(1.0, -s.eigenvalues[k] * t);
    }
    auto out = s.synthesize(c);
    std::copy(out.begin(), out.end(), amps.begin());
}

} // namespace detail

/// sum_k e^{-i E_k t} <v_k|psi> v_k.
inline StateVector exact_evolve(StateVector state, const SpectralData &s, double t) {
    if (state.dimension() != s.dimension()) {
        throw ShapeError("exact_evolve: state dimension " + std::to_string(state.dimension()) +
                         " vs spectrum dimension " + std::to_string(s.dimension()));
    }
    detail::exact_evolve_inplace(state.amplitudes(), s, t);
    return state;
}

inline StateVector trotter_evolve(StateVector state, const Hamiltonian &h, double t,
                                  const TrotterConfig &cfg) {
    detail::require_register(state, h.qubit_count(), "trotter_evolve");
    detail::trotter_product(state.amplitudes(), h, t, cfg);
    return state;
}

struct ExactPropagator {
    std::reference_wrapper<const SpectralData> spectral;
};

struct TrotterPropagator {
    std::reference_wrapper<const Hamiltonian> hamiltonian;
    TrotterConfig config;
};

using Propagator = std::variant<ExactPropagator, TrotterPropagator>;

/**
 * |0><0| (x) I + |1><1| (x) U(tau) with the ancilla as the highest qubit.
 *
 * In Trotter mode every term rotation is controlled individually, acting only
 * on the ancilla-1 half of the amplitude array.
 */
inline StateVector controlled_evolve(StateVector joint, const Propagator &propagator, double tau) {
    if (joint.qubit_count() < 1 || joint.dimension() % 2 != 0) {
        throw ShapeError("controlled_evolve: joint state needs an ancilla qubit");
    }
    const std::size_t sys_qubits = joint.qubit_count() - 1;
    const std::size_t half = joint.dimension() / 2;
    auto upper = joint.amplitudes().subspan(half);
    if (const auto *ex = std::get_if<ExactPropagator>(&propagator)) {
        const SpectralData &s = ex->spectral.get();
        if (s.dimension() != half) {
            throw ShapeError("controlled_evolve: system dimension mismatch");
        }
        detail::exact_evolve_inplace(upper, s, tau);
    } else {
        const auto &tp = std::get<TrotterPropagator>(propagator);
        if (tp.hamiltonian.get().qubit_count() != sys_qubits) {
            throw ShapeError("controlled_evolve: system dimension mismatch");
        }
        detail::trotter_product(upper, tp.hamiltonian.get(), tau, tp.config);
    }
    return joint;
}

} // namespace pcf
