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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcfilter/errors.hpp"

namespace pcf {

using complex_t = std::complex<double>;

/// Squared norms below this are treated as a measure-zero branch.
inline constexpr double kDegenerateNormSq = 1e-300;

/**
 * Amplitudes over 2^n computational basis states.
 *
 * Qubit q is bit q of the basis index (little-endian). The vector is allowed
 * to be unnormalized: post-selection weight stays in the amplitudes and is
 * only divided out when an observable is evaluated.
 */
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(std::size_t qubit_count)
        : qubits_(qubit_count), amps_(dimension_for(qubit_count), complex_t{}) {}

    StateVector(std::size_t qubit_count, std::vector<complex_t> amplitudes)
        : qubits_(qubit_count), amps_(std::move(amplitudes)) {
        if (amps_.size() != dimension_for(qubit_count)) {
            throw ShapeError("StateVector: expected " +
                             std::to_string(dimension_for(qubit_count)) +
                             " amplitudes, got " + std::to_string(amps_.size()));
        }
    }

    [[nodiscard]] std::size_t qubit_count() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<const complex_t> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<complex_t> amplitudes() noexcept { return amps_; }

    complex_t &operator[](std::size_t i) { return amps_[i]; }
    const complex_t &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double squared_norm() const noexcept {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    StateVector &operator*=(complex_t s) {
        for (auto &a : amps_) {
            a *= s;
        }
        return *this;
    }

    static std::size_t dimension_for(std::size_t qubit_count) {
        if (qubit_count >= 8 * sizeof(std::size_t) - 2) {
            throw ResourceLimitError("StateVector: too many qubits");
        }
        return std::size_t{1} << qubit_count;
    }

  private:
    std::size_t qubits_ = 0;
    std::vector<complex_t> amps_ = {complex_t{1.0, 0.0}};
};

using Gate1q = std::array<complex_t, 4>; // row-major 2x2

namespace detail {

inline void require_qubit(const StateVector &s, std::size_t qubit, const char *who) {
    if (qubit >= s.qubit_count()) {
        throw RangeError(std::string(who) + ": qubit " + std::to_string(qubit) +
                         " out of range for " + std::to_string(s.qubit_count()) +
                         "-qubit state");
    }
}

inline void require_same_dim(const StateVector &a, const StateVector &b, const char *who) {
    if (a.dimension() != b.dimension()) {
        throw ShapeError(std::string(who) + ": dimension mismatch (" +
                         std::to_string(a.dimension()) + " vs " +
                         std::to_string(b.dimension()) + ")");
    }
}

inline double require_nondegenerate(const StateVector &s, const char *who) {
    const double n2 = s.squared_norm();
    if (!(n2 >= kDegenerateNormSq) || !std::isfinite(n2)) {
        throw DegenerateStateError(std::string(who) + ": degenerate state (squared norm " +
                                   std::to_string(n2) + ")");
    }
    return n2;
}

} // namespace detail

inline StateVector init_basis(std::size_t n, std::size_t index) {
    StateVector s(n);
    if (index >= s.dimension()) {
        throw RangeError("init_basis: index " + std::to_string(index) + " out of range for " +
                         std::to_string(n) + " qubits");
    }
    s[index] = 1.0;
    return s;
}

/// Uniform superposition |+>^n.
inline StateVector init_uniform(std::size_t n) {
    StateVector s(n);
    const double a = 1.0 / std::sqrt(static_cast<double>(s.dimension()));
    for (auto &x : s.amplitudes()) {
        x = a;
    }
    return s;
}

/// Applies a 2x2 gate to `qubit` in place.
inline void apply_gate(StateVector &state, std::size_t qubit, const Gate1q &g) {
    detail::require_qubit(state, qubit, "apply_gate");
    const std::size_t bit = std::size_t{1} << qubit;
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const complex_t a0 = amps[i];
        const complex_t a1 = amps[i | bit];
        amps[i] = g[0] * a0 + g[1] * a1;
        amps[i | bit] = g[2] * a0 + g[3] * a1;
    }
}

namespace gates {
inline const Gate1q hadamard = {complex_t{M_SQRT1_2}, complex_t{M_SQRT1_2},
                                complex_t{M_SQRT1_2}, complex_t{-M_SQRT1_2}};
inline const Gate1q pauli_x = {0.0, 1.0, 1.0, 0.0};
inline const Gate1q pauli_y = {0.0, complex_t{0.0, -1.0}, complex_t{0.0, 1.0}, 0.0};
inline const Gate1q pauli_z = {1.0, 0.0, 0.0, -1.0};
inline const Gate1q s_dagger = {1.0, 0.0, 0.0, complex_t{0.0, -1.0}};
} // namespace gates

inline StateVector hadamard(StateVector state, std::size_t qubit) {
    detail::require_qubit(state, qubit, "hadamard");
    apply_gate(state, qubit, gates::hadamard);
    return state;
}

struct Projection {
    StateVector state;
    double probability;
};

/**
 * Zeroes every amplitude inconsistent with `outcome` on `qubit`.
 *
 * The returned state is not renormalized. The probability is relative to the
 * squared norm of the input.
 */
inline Projection project(StateVector state, std::size_t qubit, int outcome) {
    detail::require_qubit(state, qubit, "project");
    if (outcome != 0 && outcome != 1) {
        throw RangeError("project: outcome must be 0 or 1");
    }
    const double total = detail::require_nondegenerate(state, "project");
    const std::size_t bit = std::size_t{1} << qubit;
    const std::size_t want = outcome == 1 ? bit : 0;
    double kept = 0.0;
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & bit) == want) {
            kept += std::norm(amps[i]);
        } else {
            amps[i] = 0.0;
        }
    }
    return {std::move(state), std::min(1.0, kept / total)};
}

/// <a|b>, conjugate-linear in `a`.
inline complex_t inner(const StateVector &a, const StateVector &b) {
    detail::require_same_dim(a, b, "inner");
    complex_t acc{};
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

inline double fidelity_to(const StateVector &state, const StateVector &reference) {
    detail::require_same_dim(state, reference, "fidelity_to");
    const double ns = detail::require_nondegenerate(state, "fidelity_to");
    const double nr = detail::require_nondegenerate(reference, "fidelity_to");
    const double f = std::norm(inner(reference, state)) / (ns * nr);
    return std::clamp(f, 0.0, 1.0);
}

inline StateVector normalized(StateVector s) {
    const double n2 = detail::require_nondegenerate(s, "normalized");
    s *= 1.0 / std::sqrt(n2);
    return s;
}

/// |0>_A (x) system, with the ancilla as the new highest-index qubit.
inline StateVector attach_ancilla(const StateVector &system) {
    StateVector joint(system.qubit_count() + 1);
    auto src = system.amplitudes();
    std::copy(src.begin(), src.end(), joint.amplitudes().begin());
    return joint;
}

/// Keeps the ancilla-0 half of a joint state (the ancilla is the highest qubit).
inline StateVector drop_ancilla(const StateVector &joint) {
    if (joint.qubit_count() == 0) {
        throw ShapeError("drop_ancilla: state has no ancilla");
    }
    auto src = joint.amplitudes().first(joint.dimension() / 2);
    return StateVector(joint.qubit_count() - 1, {src.begin(), src.end()});
}

} // namespace pcf
