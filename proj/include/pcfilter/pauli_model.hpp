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

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcfilter/dense_matrix.hpp"
#include "pcfilter/errors.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf {

/// Largest system size for which dense matrices are materialized.
inline constexpr std::size_t kMaxDenseQubits = 12;

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
    switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw ParseError(std::string("unknown Pauli axis '") + c + "'");
    }
}

/// Bit masks describing a Pauli string's action on basis states:
/// P|b> = i^{y_count} (-1)^{popcount(b & phase)} |b ^ flip>.
struct PauliMasks {
    std::uint64_t flip = 0;  // X or Y
    std::uint64_t phase = 0; // Y or Z
    unsigned y_count = 0;

    /// Phase picked up by basis state b.
    [[nodiscard]] std::complex<double> phase_of(std::uint64_t b) const {
        static constexpr std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        unsigned k = y_count + 2u * static_cast<unsigned>(std::popcount(b & phase) & 1);
        return ipow[k & 3u];
    }
};

class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::vector<Pauli> axes) : axes_(std::move(axes)) {
        if (axes_.size() > 62) {
            throw ResourceLimitError("PauliString: more than 62 qubits");
        }
    }

    /// Parses e.g. "XZIY"; character q is the axis on qubit q.
    static PauliString parse(std::string_view text) {
        std::vector<Pauli> axes;
        axes.reserve(text.size());
        for (char c : text) {
            axes.push_back(pauli_from_char(c));
        }
        return PauliString(std::move(axes));
    }

    /// Identity everywhere except the listed (qubit, axis) pairs.
    static PauliString sparse(std::size_t n,
                              std::initializer_list<std::pair<std::size_t, Pauli>> ops) {
        std::vector<Pauli> axes(n, Pauli::I);
        for (auto [q, p] : ops) {
            if (q >= n) {
                throw RangeError("PauliString::sparse: qubit out of range");
            }
            axes[q] = p;
        }
        return PauliString(std::move(axes));
    }

    [[nodiscard]] std::size_t size() const noexcept { return axes_.size(); }
    [[nodiscard]] Pauli operator[](std::size_t q) const { return axes_[q]; }
    [[nodiscard]] const std::vector<Pauli> &axes() const noexcept { return axes_; }

    [[nodiscard]] bool is_identity() const {
        for (auto p : axes_) {
            if (p != Pauli::I) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] std::uint64_t support_mask() const {
        std::uint64_t m = 0;
        for (std::size_t q = 0; q < axes_.size(); ++q) {
            if (axes_[q] != Pauli::I) {
                m |= std::uint64_t{1} << q;
            }
        }
        return m;
    }

    [[nodiscard]] PauliMasks masks() const {
        PauliMasks m;
        for (std::size_t q = 0; q < axes_.size(); ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (axes_[q]) {
            case Pauli::I: break;
            case Pauli::X: m.flip |= bit; break;
            case Pauli::Y:
                m.flip |= bit;
                m.phase |= bit;
                ++m.y_count;
                break;
            case Pauli::Z: m.phase |= bit; break;
            }
        }
        return m;
    }

    [[nodiscard]] std::string str() const {
        std::string s;
        for (auto p : axes_) {
            s.push_back(to_char(p));
        }
        return s;
    }

    friend bool operator==(const PauliString &, const PauliString &) = default;
    friend auto operator<=>(const PauliString &, const PauliString &) = default;

  private:
    std::vector<Pauli> axes_;
};

struct PauliTerm {
    double coefficient = 0.0;
    PauliString string;
};

/**
 * Real-weighted sum of Pauli strings.
 *
 * Construction merges duplicate strings (keeping the position of the first
 * occurrence) and drops terms whose merged coefficient is exactly zero. The
 * surviving order is the order Trotter products use.
 */
class Hamiltonian {
  public:
    Hamiltonian(std::size_t qubit_count, std::vector<PauliTerm> terms) : n_(qubit_count) {
        if (qubit_count == 0) {
            throw InvalidSizeError("Hamiltonian: qubit count must be positive");
        }
        std::map<PauliString, std::size_t> seen;
        for (auto &t : terms) {
            if (t.string.size() != n_) {
                throw ShapeError("Hamiltonian: term '" + t.string.str() + "' has length " +
                                 std::to_string(t.string.size()) + ", expected " +
                                 std::to_string(n_));
            }
            if (!std::isfinite(t.coefficient)) {
                throw InvalidSizeError("Hamiltonian: non-finite coefficient on '" +
                                       t.string.str() + "'");
            }
            auto [it, inserted] = seen.try_emplace(t.string, terms_.size());
            if (inserted) {
                terms_.push_back(std::move(t));
            } else {
                terms_[it->second].coefficient += t.coefficient;
            }
        }
        std::erase_if(terms_, [](const PauliTerm &t) { return t.coefficient == 0.0; });
    }

    [[nodiscard]] std::size_t qubit_count() const noexcept { return n_; }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    /// Sum of |coefficients|; an upper bound on the spectral radius.
    [[nodiscard]] double one_norm() const {
        double s = 0.0;
        for (const auto &t : terms_) {
            s += std::abs(t.coefficient);
        }
        return s;
    }

  private:
    std::size_t n_;
    std::vector<PauliTerm> terms_;
};

/// a*A + b*B, terms of A first.
inline Hamiltonian linear_combination(double a, const Hamiltonian &A, double b,
                                      const Hamiltonian &B) {
    if (A.qubit_count() != B.qubit_count()) {
        throw ShapeError("linear_combination: qubit count mismatch");
    }
    std::vector<PauliTerm> terms;
    for (const auto &t : A.terms()) {
        terms.push_back({a * t.coefficient, t.string});
    }
    for (const auto &t : B.terms()) {
        terms.push_back({b * t.coefficient, t.string});
    }
    return Hamiltonian(A.qubit_count(), std::move(terms));
}

/// Open-boundary XYZ chain: sum_i (jx XX + jy YY + jz ZZ)_{i,i+1} + h sum_i Z_i.
/// Terms are ordered XX pairs, YY pairs, ZZ pairs, then Z fields.
inline Hamiltonian build_heisenberg_xyz(std::size_t n, double jx, double jy, double jz,
                                        double h) {
    if (n < 2) {
        throw InvalidSizeError("build_heisenberg_xyz: need at least 2 sites, got " +
                               std::to_string(n));
    }
    std::vector<PauliTerm> terms;
    for (auto [axis, j] : {std::pair{Pauli::X, jx}, {Pauli::Y, jy}, {Pauli::Z, jz}}) {
        if (j == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            terms.push_back({j, PauliString::sparse(n, {{i, axis}, {i + 1, axis}})});
        }
    }
    if (h != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            terms.push_back({h, PauliString::sparse(n, {{i, Pauli::Z}})});
        }
    }
    return Hamiltonian(n, std::move(terms));
}

/// -sum_i X_i; ground state |+>^n.
inline Hamiltonian build_transverse_field(std::size_t n) {
    std::vector<PauliTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
        terms.push_back({-1.0, PauliString::sparse(n, {{i, Pauli::X}})});
    }
    return Hamiltonian(n, std::move(terms));
}

namespace detail {

/// out[b ^ flip] += scale * phase(b) * in[b] over every b.
inline void accumulate_pauli(std::span<const complex_t> in, std::span<complex_t> out,
                             const PauliMasks &m, complex_t scale) {
    for (std::size_t b = 0; b < in.size(); ++b) {
        out[b ^ m.flip] += scale * m.phase_of(b) * in[b];
    }
}

/// <psi|P|psi> without allocation.
inline complex_t pauli_quadratic_form(std::span<const complex_t> psi, const PauliMasks &m) {
    complex_t acc{};
    for (std::size_t b = 0; b < psi.size(); ++b) {
        acc += std::conj(psi[b ^ m.flip]) * m.phase_of(b) * psi[b];
    }
    return acc;
}

inline void require_register(const StateVector &s, std::size_t n, const char *who) {
    if (s.dimension() != (std::size_t{1} << n) || s.qubit_count() != n) {
        throw ShapeError(std::string(who) + ": state has " + std::to_string(s.qubit_count()) +
                         " qubits, operator acts on " + std::to_string(n));
    }
}

} // namespace detail

/// coefficient * P |state>, via bit-index traversal.
inline StateVector apply_term(const StateVector &state, const PauliTerm &term) {
    detail::require_register(state, term.string.size(), "apply_term");
    StateVector out(state.qubit_count());
    detail::accumulate_pauli(state.amplitudes(), out.amplitudes(), term.string.masks(),
                             term.coefficient);
    return out;
}

inline StateVector apply_hamiltonian(const StateVector &state, const Hamiltonian &h) {
    detail::require_register(state, h.qubit_count(), "apply_hamiltonian");
    StateVector out(state.qubit_count());
    for (const auto &t : h.terms()) {
        detail::accumulate_pauli(state.amplitudes(), out.amplitudes(), t.string.masks(),
                                 t.coefficient);
    }
    return out;
}

/// Unnormalized quadratic form <psi|H|psi>.
inline double quadratic_form(const StateVector &state, const Hamiltonian &h) {
    detail::require_register(state, h.qubit_count(), "quadratic_form");
    double acc = 0.0;
    for (const auto &t : h.terms()) {
        acc += t.coefficient *
               detail::pauli_quadratic_form(state.amplitudes(), t.string.masks()).real();
    }
    return acc;
}

/// Energy of the normalized state.
inline double energy(const StateVector &state, const Hamiltonian &h) {
    const double n2 = detail::require_nondegenerate(state, "energy");
    return quadratic_form(state, h) / n2;
}

inline ComplexMatrix to_dense(const Hamiltonian &h) {
    if (h.qubit_count() > kMaxDenseQubits) {
        throw ResourceLimitError("to_dense: " + std::to_string(h.qubit_count()) +
                                 " qubits exceeds the dense cap of " +
                                 std::to_string(kMaxDenseQubits));
    }
    const std::size_t dim = std::size_t{1} << h.qubit_count();
    ComplexMatrix m(dim);
    for (const auto &t : h.terms()) {
        const auto masks = t.string.masks();
        for (std::size_t b = 0; b < dim; ++b) {
            m(b ^ masks.flip, b) += t.coefficient * masks.phase_of(b);
        }
    }
    return m;
}

// Text format: one "<coefficient> <axes>" per line, '#' starts a comment.

inline Hamiltonian parse_hamiltonian(std::istream &in) {
    std::vector<PauliTerm> terms;
    std::size_t n = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string coeff_text;
        if (!(ls >> coeff_text)) {
            continue;
        }
        std::string axes;
        std::string extra;
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (!(ls >> axes) || (ls >> extra)) {
            throw ParseError(where + "expected '<coefficient> <axes>'");
        }
        double c = 0.0;
        try {
            std::size_t used = 0;
            c = std::stod(coeff_text, &used);
            if (used != coeff_text.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception &) {
            throw ParseError(where + "bad coefficient '" + coeff_text + "'");
        }
        PauliString ps;
        try {
            ps = PauliString::parse(axes);
        } catch (const ParseError &e) {
            throw ParseError(where + e.what());
        }
        if (n == 0) {
            n = ps.size();
        } else if (ps.size() != n) {
            throw ParseError(where + "axes length " + std::to_string(ps.size()) +
                             " differs from earlier terms (" + std::to_string(n) + ")");
        }
        terms.push_back({c, std::move(ps)});
    }
    if (n == 0) {
        throw ParseError("hamiltonian file contains no terms");
    }
    return Hamiltonian(n, std::move(terms));
}

inline std::string format_hamiltonian(const Hamiltonian &h) {
    std::string out;
    char buf[64];
    for (const auto &t : h.terms()) {
        std::snprintf(buf, sizeof buf, "%.17g ", t.coefficient);
        out += buf;
        out += t.string.str();
        out += '\n';
    }
    return out;
}

} // namespace pcf
