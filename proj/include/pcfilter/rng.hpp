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

#include <cstdint>
#include <random>

namespace pcf {

/**
 * Seeded streams.
 *
 * A root seed is split into independent streams by hashing
 * (root, stream id) with SplitMix64 and seeding a std::mt19937_64 with the
 * result. Stream ids:
 *
 *   0  gate noise and readout flips
 *   1  ancilla measurement outcomes
 *   2  measurement shots
 *
 * Per-step sub-seeds (used for energy sampling inside a trajectory) are
 * derived as stream_seed(root, 16 + step).
 */
enum class StreamId : std::uint64_t { noise = 0, ancilla = 1, shots = 2 };

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(splitmix64(root) ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
}

inline constexpr std::uint64_t stream_seed(std::uint64_t root, StreamId id) {
    return stream_seed(root, static_cast<std::uint64_t>(id));
}

inline constexpr std::uint64_t step_seed(std::uint64_t root, std::uint64_t step) {
    return stream_seed(root, 16 + step);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection.
        while (true) {
            const unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
            const auto low = static_cast<std::uint64_t>(m);
            if (low >= n || low >= (-n) % n) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 engine_;
};

} // namespace pcf
