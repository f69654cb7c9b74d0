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
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pcfilter/dense_matrix.hpp"
#include "pcfilter/errors.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf {

inline constexpr double kDefaultDegeneracyTol = 1e-8;
inline constexpr int kMaxQlIterations = 50;

/// Full eigen-decomposition of a Hermitian matrix. Eigenvalues ascend; column k
/// of `eigenvectors` belongs to eigenvalues[k] and has its largest-magnitude
/// component real and positive.
struct SpectralData {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    [[nodiscard]] std::size_t dimension() const noexcept { return eigenvalues.size(); }

    [[nodiscard]] std::vector<complex_t> eigenvector(std::size_t k) const {
        std::vector<complex_t> v(dimension());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = eigenvectors(i, k);
        }
        return v;
    }

    /// <v_k|psi> for every k.
    [[nodiscard]] std::vector<complex_t> components(std::span<const complex_t> psi) const {
        const std::size_t n = dimension();
        std::vector<complex_t> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            const complex_t p = psi[i];
            if (p == complex_t{}) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                c[k] += std::conj(eigenvectors(i, k)) * p;
            }
        }
        return c;
    }

    /// sum_k weights[k] v_k.
    [[nodiscard]] std::vector<complex_t> synthesize(std::span<const complex_t> weights) const {
        const std::size_t n = dimension();
        std::vector<complex_t> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            complex_t acc{};
            for (std::size_t k = 0; k < n; ++k) {
                acc += eigenvectors(i, k) * weights[k];
            }
            out[i] = acc;
        }
        return out;
    }

    /// Number of eigenvalues within `tol` of the lowest one.
    [[nodiscard]] std::size_t ground_multiplicity(double tol = kDefaultDegeneracyTol) const {
        std::size_t m = 0;
        while (m < eigenvalues.size() && eigenvalues[m] - eigenvalues.front() <= tol) {
            ++m;
        }
        return m;
    }

    /// Ground eigenvector as a state on `qubit_count` qubits.
    [[nodiscard]] StateVector ground_state(std::size_t qubit_count) const {
        return StateVector(qubit_count, eigenvector(0));
    }
};

namespace detail {

// Implicit-shift QL on a real symmetric tridiagonal matrix (diagonal d,
// off-diagonal e with e[i] coupling i and i+1, e[n-1] unused). Rotations are
// accumulated into the row-major n x n matrix z.
inline void tridiagonal_ql(std::vector<double> &d, std::vector<double> &e,
                           std::vector<double> &z) {
    const std::size_t n = d.size();
    if (n == 0) {
        return;
    }
    e[n - 1] = 0.0;
    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) {
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxQlIterations) {
                    throw NumericalError(
                        "diagonalize: QL iteration did not converge for eigenvalue " +
                        std::to_string(l) + " of " + std::to_string(n) + " after " +
                        std::to_string(kMaxQlIterations) + " sweeps (|e|=" +
                        std::to_string(std::abs(e[l])) + ", tol=" +
                        std::to_string(eps * tst1) + ")");
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        double &zi = z[k * n + ii];
                        double &zi1 = z[k * n + ii + 1];
                        h = zi1;
                        zi1 = s * zi + c * h;
                        zi = c * zi - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

} // namespace detail

/**
 * Eigen-decomposition of a dense Hermitian matrix.
 *
 * Householder reflections reduce the matrix to Hermitian tridiagonal form; a
 * diagonal phase similarity makes the off-diagonal real, and implicit-shift QL
 * finishes the job. Only the lower triangle's Hermitian part matters; the
 * input is symmetrized first. Deterministic for a given input.
 */
inline SpectralData diagonalize(const ComplexMatrix &input) {
    const std::size_t n = input.size();
    if (n == 0) {
        throw InvalidSizeError("diagonalize: empty matrix");
    }
    ComplexMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const complex_t x = 0.5 * (input(i, j) + std::conj(input(j, i)));
            a(i, j) = x;
            a(j, i) = std::conj(x);
        }
        a(i, i) = a(i, i).real();
    }

    // Householder reduction: a <- H_k a H_k with H_k = I - 2 v v^*.
    std::vector<std::vector<complex_t>> reflectors;
    reflectors.reserve(n > 2 ? n - 2 : 0);
    std::vector<complex_t> p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t off = k + 1;
        const std::size_t m = n - off;
        double xnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            xnorm2 += std::norm(a(off + i, k));
        }
        const double xnorm = std::sqrt(xnorm2);
        const complex_t x0 = a(off, k);
        double tail2 = xnorm2 - std::norm(x0);
        if (xnorm == 0.0 || tail2 <= 0.0) {
            reflectors.emplace_back(); // already tridiagonal in this column
            continue;
        }
        const double ax0 = std::abs(x0);
        const complex_t phase = ax0 > 0.0 ? x0 / ax0 : complex_t{1.0};
        const complex_t alpha = -phase * xnorm;

        std::vector<complex_t> v(m);
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a(off + i, k);
        }
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (const auto &x : v) {
            vnorm2 += std::norm(x);
        }
        const double inv = 1.0 / std::sqrt(vnorm2);
        for (auto &x : v) {
            x *= inv;
        }

        // Trailing block B <- B - 2 (v w^* + w v^*), w = Bv - (v^*Bv) v.
        double kappa = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            complex_t acc{};
            for (std::size_t j = 0; j < m; ++j) {
                acc += a(off + i, off + j) * v[j];
            }
            p[i] = acc;
            kappa += (std::conj(v[i]) * acc).real();
        }
        for (std::size_t i = 0; i < m; ++i) {
            p[i] -= kappa * v[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                a(off + i, off + j) -=
                    2.0 * (v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]));
            }
        }
        a(off, k) = alpha;
        a(k, off) = std::conj(alpha);
        for (std::size_t i = 1; i < m; ++i) {
            a(off + i, k) = 0.0;
            a(k, off + i) = 0.0;
        }
        reflectors.push_back(std::move(v));
    }

    // Phase similarity D^* T D turns the complex subdiagonal into |e_i|.
    std::vector<double> d(n);
    std::vector<double> e(n, 0.0);
    std::vector<complex_t> phases(n, complex_t{1.0});
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a(i, i).real();
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const complex_t sub = a(i + 1, i);
        const double mag = std::abs(sub);
        e[i] = mag;
        phases[i + 1] = mag > 0.0 ? phases[i] * (sub / mag) : phases[i];
    }

    std::vector<double> z(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        z[i * n + i] = 1.0;
    }
    detail::tridiagonal_ql(d, e, z);

    // Eigenvectors = H_0 H_1 ... H_{n-3} D Z.
    ComplexMatrix vecs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            vecs(i, j) = phases[i] * z[i * n + j];
        }
    }
    std::vector<complex_t> proj(n);
    for (std::size_t k = reflectors.size(); k-- > 0;) {
        const auto &v = reflectors[k];
        if (v.empty()) {
            continue;
        }
        const std::size_t off = k + 1;
        std::fill(proj.begin(), proj.end(), complex_t{});
        for (std::size_t i = 0; i < v.size(); ++i) {
            const complex_t cv = std::conj(v[i]);
            for (std::size_t j = 0; j < n; ++j) {
                proj[j] += cv * vecs(off + i, j);
            }
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const complex_t tv = 2.0 * v[i];
            for (std::size_t j = 0; j < n; ++j) {
                vecs(off + i, j) -= tv * proj[j];
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    SpectralData out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.eigenvalues[k] = d[src];
        std::size_t big = 0;
        double bigmag = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(vecs(i, src));
            if (mag > bigmag) {
                bigmag = mag;
                big = i;
            }
        }
        const complex_t fix = bigmag > 0.0 ? std::conj(vecs(big, src)) / bigmag : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.eigenvectors(i, k) = vecs(i, src) * fix;
        }
        out.eigenvectors(big, k) = bigmag;
    }
    return out;
}

inline SpectralData diagonalize(const Hamiltonian &h) { return diagonalize(to_dense(h)); }

struct GapResult {
    double gap = 0.0;
    bool degenerate = false; // every eigenvalue lies within tol of E0
};

inline GapResult spectral_gap(const SpectralData &s, double degeneracy_tol = kDefaultDegeneracyTol) {
    if (s.dimension() < 2) {
        throw InvalidSizeError("spectral_gap: need at least two eigenvalues");
    }
    const double e0 = s.eigenvalues.front();
    for (double ek : s.eigenvalues) {
        if (ek - e0 > degeneracy_tol) {
            return {ek - e0, false};
        }
    }
    return {0.0, true};
}

/// Weight of the normalized state in the (possibly degenerate) ground manifold.
inline double ground_overlap(const StateVector &state, const SpectralData &s,
                             double degeneracy_tol = kDefaultDegeneracyTol) {
    if (state.dimension() != s.dimension()) {
        throw ShapeError("ground_overlap: state dimension " + std::to_string(state.dimension()) +
                         " vs spectrum dimension " + std::to_string(s.dimension()));
    }
    const double n2 = detail::require_nondegenerate(state, "ground_overlap");
    const std::size_t m = s.ground_multiplicity(degeneracy_tol);
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        complex_t c{};
        for (std::size_t i = 0; i < s.dimension(); ++i) {
            c += std::conj(s.eigenvectors(i, k)) * state[i];
        }
        acc += std::norm(c);
    }
    return std::clamp(acc / n2, 0.0, 1.0);
}

} // namespace pcf
