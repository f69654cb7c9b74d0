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

// Test-only oracles. Nothing here goes through the library's bit-mask
// kernels: dense operators are built from explicit 2x2 Kronecker products.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pcfilter/dense_matrix.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf::testing {

using cd = std::complex<double>;

inline ComplexMatrix pauli_matrix(Pauli p) {
    ComplexMatrix m(2);
    switch (p) {
    case Pauli::I: m(0, 0) = 1; m(1, 1) = 1; break;
    case Pauli::X: m(0, 1) = 1; m(1, 0) = 1; break;
    case Pauli::Y: m(0, 1) = cd(0, -1); m(1, 0) = cd(0, 1); break;
    case Pauli::Z: m(0, 0) = 1; m(1, 1) = -1; break;
    }
    return m;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    const std::size_t n = a.size() * b.size();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            for (std::size_t k = 0; k < b.size(); ++k)
                for (std::size_t l = 0; l < b.size(); ++l)
                    out(i * b.size() + k, j * b.size() + l) = a(i, j) * b(k, l);
    return out;
}

/// Little-endian: qubit 0 is the rightmost Kronecker factor.
inline ComplexMatrix dense_string(const PauliString &s) {
    ComplexMatrix m = ComplexMatrix::identity(1);
    for (std::size_t q = s.size(); q-- > 0;) {
        m = kron(m, pauli_matrix(s[q]));
    }
    return m;
}

inline ComplexMatrix dense_oracle(const Hamiltonian &h) {
    ComplexMatrix m(std::size_t{1} << h.qubit_count());
    for (const auto &t : h.terms()) {
        const auto p = dense_string(t.string);
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                m(i, j) += t.coefficient * p(i, j);
    }
    return m;
}

inline ComplexMatrix scaled(const ComplexMatrix &a, cd s) {
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            out(i, j) *= s;
    return out;
}

inline ComplexMatrix added(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            out(i, j) += b(i, j);
    return out;
}

/// exp(A) by scaling and squaring with a Taylor series.
inline ComplexMatrix expm(const ComplexMatrix &a) {
    int squarings = 0;
    double nrm = a.norm();
    while (nrm > 0.25) {
        nrm *= 0.5;
        ++squarings;
    }
    const ComplexMatrix x = scaled(a, std::ldexp(1.0, -squarings));
    ComplexMatrix sum = ComplexMatrix::identity(a.size());
    ComplexMatrix term = ComplexMatrix::identity(a.size());
    for (int k = 1; k <= 30; ++k) {
        term = scaled(term * x, 1.0 / k);
        sum = added(sum, term);
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    return sum;
}

/// e^{-i H t}
inline ComplexMatrix dense_propagator(const ComplexMatrix &h, double t) {
    return expm(scaled(h, cd(0.0, -t)));
}

inline std::vector<cd> matvec(const ComplexMatrix &m, std::span<const cd> v) {
    return m.apply({v.begin(), v.end()});
}

inline StateVector random_state(std::size_t n, std::mt19937_64 &rng, bool normalize = true) {
    std::normal_distribution<double> g;
    StateVector s(n);
    for (auto &a : s.amplitudes()) {
        a = cd(g(rng), g(rng));
    }
    return normalize ? normalized(s) : s;
}

inline Hamiltonian random_hamiltonian(std::size_t n, std::size_t terms, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> axis(0, 3);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<PauliTerm> out;
    for (std::size_t t = 0; t < terms; ++t) {
        std::vector<Pauli> axes(n);
        for (auto &a : axes) {
            a = static_cast<Pauli>(axis(rng));
        }
        out.push_back({coeff(rng), PauliString(axes)});
    }
    return Hamiltonian(n, std::move(out));
}

inline ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = g(rng);
        for (std::size_t j = 0; j < i; ++j) {
            m(i, j) = cd(g(rng), g(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

inline double max_abs_diff(std::span<const cd> a, std::span<const cd> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

inline double l2_diff(std::span<const cd> a, std::span<const cd> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::norm(a[i] - b[i]);
    }
    return std::sqrt(s);
}

// Frozen from an independent numpy/scipy exact diagonalization of the N = 4
// XYZ chain (Jx = Jy = 1, Jz = 0.5, h = 0) with the Neel state |0101>.
inline constexpr double kBenchE0 = -5.424343992020249;
inline constexpr double kBenchGap = 1.924343992020249;
inline constexpr double kBenchTau = 1.158330909032093;
inline constexpr double kBenchGamma = 0.281883305220263;
inline constexpr std::size_t kBenchFirstDegreeAbove999 = 101;

inline Hamiltonian benchmark_hamiltonian() { return build_heisenberg_xyz(4, 1.0, 1.0, 0.5, 0.0); }

} // namespace pcf::testing
