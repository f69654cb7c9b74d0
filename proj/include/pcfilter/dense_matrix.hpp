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
#include <cstddef>
#include <vector>

#include "pcfilter/errors.hpp"

namespace pcf {

/// Square complex matrix, row-major.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    std::complex<double> &operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    const std::complex<double> &operator()(std::size_t r, std::size_t c) const {
        return data_[r * n_ + c];
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] ComplexMatrix adjoint() const {
        ComplexMatrix out(n_);
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t c = 0; c < n_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.n_ != b.n_) {
            throw ShapeError("ComplexMatrix: size mismatch in product");
        }
        ComplexMatrix out(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            for (std::size_t k = 0; k < a.n_; ++k) {
                const auto aik = a(i, k);
                if (aik == std::complex<double>{}) {
                    continue;
                }
                for (std::size_t j = 0; j < a.n_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    [[nodiscard]] std::vector<std::complex<double>>
    apply(const std::vector<std::complex<double>> &v) const {
        if (v.size() != n_) {
            throw ShapeError("ComplexMatrix: vector size mismatch");
        }
        std::vector<std::complex<double>> out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::complex<double> acc{};
            for (std::size_t j = 0; j < n_; ++j) {
                acc += (*this)(i, j) * v[j];
            }
            out[i] = acc;
        }
        return out;
    }

    /// Frobenius norm.
    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &x : data_) {
            acc += std::norm(x);
        }
        return std::sqrt(acc);
    }

    [[nodiscard]] std::complex<double> trace() const {
        std::complex<double> t{};
        for (std::size_t i = 0; i < n_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

  private:
    std::size_t n_ = 0;
    std::vector<std::complex<double>> data_;
};

} // namespace pcf
