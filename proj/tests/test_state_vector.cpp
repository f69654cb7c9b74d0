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
#include <gtest/gtest.h>

#include <random>

#include "pcfilter/state_vector.hpp"
#include "test_helpers.hpp"

using namespace pcf;
using pcf::testing::cd;

TEST(InitBasis, Examples) {
    const auto s = init_basis(1, 0);
    EXPECT_EQ(s[0], cd(1.0));
    EXPECT_EQ(s[1], cd(0.0));

    const auto neel = init_basis(4, 5);
    EXPECT_EQ(neel.dimension(), 16u);
    EXPECT_EQ(neel[0b0101], cd(1.0));
    EXPECT_DOUBLE_EQ(neel.squared_norm(), 1.0);

    EXPECT_EQ(init_basis(2, 3)[3], cd(1.0));
}

TEST(InitBasis, OutOfRange) { EXPECT_THROW(init_basis(2, 4), RangeError); }

TEST(StateVector, RejectsWrongAmplitudeCount) {
    EXPECT_THROW(StateVector(2, std::vector<cd>(3)), ShapeError);
}

TEST(Hadamard, OnZero) {
    const auto s = hadamard(init_basis(1, 0), 0);
    EXPECT_NEAR(s[0].real(), M_SQRT1_2, 1e-15);
    EXPECT_NEAR(s[1].real(), M_SQRT1_2, 1e-15);
}

TEST(Hadamard, Involution) {
    std::mt19937_64 rng(1);
    const auto psi = pcf::testing::random_state(4, rng);
    for (std::size_t q = 0; q < 4; ++q) {
        const auto back = hadamard(hadamard(psi, q), q);
        EXPECT_LT(pcf::testing::max_abs_diff(back.amplitudes(), psi.amplitudes()), 1e-14);
    }
}

TEST(Hadamard, SecondQubitMatchesDenseOracle) {
    const auto s = hadamard(init_basis(2, 0), 1);
    using pcf::testing::kron;
    using pcf::testing::pauli_matrix;
    ComplexMatrix h(2);
    h(0, 0) = h(0, 1) = h(1, 0) = M_SQRT1_2;
    h(1, 1) = -M_SQRT1_2;
    const auto full = kron(h, pauli_matrix(Pauli::I)); // qubit 1 is the left factor
    const auto want = pcf::testing::matvec(full, init_basis(2, 0).amplitudes());
    EXPECT_LT(pcf::testing::max_abs_diff(s.amplitudes(), want), 1e-15);
    EXPECT_NEAR(s[0b10].real(), M_SQRT1_2, 1e-15);
    EXPECT_EQ(s[0b01], cd(0.0));
}

TEST(Hadamard, PreservesNormAndChecksQubit) {
    std::mt19937_64 rng(2);
    auto psi = pcf::testing::random_state(5, rng, false);
    const double n0 = psi.squared_norm();
    for (std::size_t q = 0; q < 5; ++q) {
        psi = hadamard(psi, q);
        EXPECT_NEAR(psi.squared_norm(), n0, 1e-13 * n0);
    }
    EXPECT_THROW(hadamard(psi, 5), RangeError);
}

TEST(Project, PlusOntoZero) {
    const auto [s, p] = project(hadamard(init_basis(1, 0), 0), 0, 0);
    EXPECT_NEAR(p, 0.5, 1e-15);
    EXPECT_NEAR(s[0].real(), M_SQRT1_2, 1e-15);
    EXPECT_EQ(s[1], cd(0.0));
}

TEST(Project, ZeroProbabilityBranchIsDegenerate) {
    const auto [s, p] = project(init_basis(1, 0), 0, 1);
    EXPECT_EQ(p, 0.0);
    EXPECT_THROW(project(s, 0, 1), DegenerateStateError);
    EXPECT_THROW(normalized(s), DegenerateStateError);
}

TEST(Project, ProbabilitiesSumToNormAndIdempotent) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto psi = pcf::testing::random_state(4, rng, false);
        const double n2 = psi.squared_norm();
        for (std::size_t q = 0; q < 4; ++q) {
            const auto p0 = project(psi, q, 0);
            const auto p1 = project(psi, q, 1);
            EXPECT_NEAR(p0.probability + p1.probability, 1.0, 1e-13);
            EXPECT_NEAR(p0.state.squared_norm() + p1.state.squared_norm(), n2, 1e-13 * n2);
            const auto again = project(p0.state, q, 0);
            EXPECT_DOUBLE_EQ(again.probability, 1.0);
            EXPECT_EQ(pcf::testing::max_abs_diff(again.state.amplitudes(), p0.state.amplitudes()),
                      0.0);
        }
    }
}

TEST(Inner, Basics) {
    EXPECT_EQ(inner(init_basis(1, 0), init_basis(1, 0)), cd(1.0));
    EXPECT_EQ(inner(init_basis(1, 0), init_basis(1, 1)), cd(0.0));
    std::mt19937_64 rng(4);
    const auto psi = pcf::testing::random_state(3, rng, false);
    const auto self = inner(psi, psi);
    EXPECT_EQ(self.imag(), 0.0);
    EXPECT_NEAR(self.real(), psi.squared_norm(), 1e-14 * psi.squared_norm());
    EXPECT_THROW(inner(init_basis(1, 0), init_basis(2, 0)), ShapeError);
}

TEST(Inner, ConjugateLinearInFirstArgument) {
    std::mt19937_64 rng(6);
    const auto a = pcf::testing::random_state(2, rng);
    const auto b = pcf::testing::random_state(2, rng);
    auto ia = a;
    ia *= cd(0.0, 1.0);
    EXPECT_NEAR(std::abs(inner(ia, b) - cd(0.0, -1.0) * inner(a, b)), 0.0, 1e-15);
}

TEST(Fidelity, PhaseInvariantAndSymmetric) {
    std::mt19937_64 rng(8);
    const auto psi = pcf::testing::random_state(3, rng);
    EXPECT_NEAR(fidelity_to(psi, psi), 1.0, 1e-14);
    auto rotated = psi;
    rotated *= std::polar(2.0, 0.7);
    EXPECT_NEAR(fidelity_to(rotated, psi), 1.0, 1e-14);
    const auto other = pcf::testing::random_state(3, rng);
    EXPECT_NEAR(fidelity_to(psi, other), fidelity_to(other, psi), 1e-15);
    EXPECT_NEAR(fidelity_to(hadamard(init_basis(1, 0), 0), init_basis(1, 0)), 0.5, 1e-15);
    EXPECT_THROW(fidelity_to(StateVector(1), psi), ShapeError);
    EXPECT_THROW(fidelity_to(StateVector(3), psi), DegenerateStateError);
}

TEST(Ancilla, AttachPutsAncillaOnHighestQubit) {
    const auto a = attach_ancilla(init_basis(1, 0));
    EXPECT_EQ(a.qubit_count(), 2u);
    EXPECT_EQ(a[0], cd(1.0));
    const auto b = attach_ancilla(init_basis(1, 1));
    EXPECT_EQ(b[1], cd(1.0));
    EXPECT_EQ(b[3], cd(0.0));
}

TEST(Ancilla, AttachPreservesNormAndDropInverts) {
    std::mt19937_64 rng(12);
    const auto psi = pcf::testing::random_state(3, rng, false);
    const auto joint = attach_ancilla(psi);
    EXPECT_EQ(joint.dimension(), 2 * psi.dimension());
    EXPECT_DOUBLE_EQ(joint.squared_norm(), psi.squared_norm());
    const auto back = drop_ancilla(joint);
    EXPECT_EQ(pcf::testing::max_abs_diff(back.amplitudes(), psi.amplitudes()), 0.0);
}
