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
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcfilter/errors.hpp"
#include "pcfilter/evolution.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/rng.hpp"
#include "pcfilter/sampling.hpp"
#include "pcfilter/spectral.hpp"
#include "pcfilter/state_vector.hpp"

namespace pcf {

//----------------------------------------------------------------------------
// Closed-form predictions
//----------------------------------------------------------------------------

/// tau = 2 pi / |E0|, which puts the ground state on a passband peak.
inline double resonance_tau(double e0) {
    if (!(std::abs(e0) > 1e-9)) {
        throw ResonanceUndefinedError(
            "resonance_tau: |E0| <= 1e-9; shift the spectrum or pass tau explicitly");
    }
    return 2.0 * std::numbers::pi / std::abs(e0);
}

/// ((1 + e^{-i E tau}) / 2)^d = e^{-i d E tau / 2} cos^d(E tau / 2).
inline std::complex<double> predicted_amplitude(double ek, double tau, std::size_t d) {
    const double half = 0.5 * ek * tau;
    const double dd = static_cast<double>(d);
    return std::polar(1.0, -dd * half) * std::pow(std::cos(half), dd);
}

/// exp(-d gap^2 tau^2 / 8)
inline double predicted_excited_decay(double gap, double tau, std::size_t d) {
    if (gap < 0.0 || !(tau > 0.0)) {
        throw InvalidSizeError("predicted_excited_decay: need gap >= 0 and tau > 0");
    }
    const double x = gap * tau;
    return std::exp(-static_cast<double>(d) * x * x / 8.0);
}

/// Smallest d with exp(-d (gap tau)^2 / 8) <= epsilon, i.e.
/// ceil(8 ln(1/epsilon) / (gap tau)^2).
inline std::size_t degree_for_precision(double gap, double tau, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw InvalidSizeError("degree_for_precision: epsilon must lie in (0, 1]");
    }
    const double x = gap * tau;
    if (!(x > 0.0)) {
        throw UndefinedDegreeError("degree_for_precision: gap * tau must be positive");
    }
    const double raw = 8.0 * std::log(1.0 / epsilon) / (x * x);
    auto d = static_cast<std::size_t>(std::ceil(raw));
    // Snap to the exact boundary of the exponential test; ceil of a rounded
    // ratio can land one off.
    while (d > 0 && predicted_excited_decay(gap, tau, d - 1) <= epsilon) {
        --d;
    }
    while (predicted_excited_decay(gap, tau, d) > epsilon) {
        ++d;
    }
    return d;
}

/// Ground survival amplitude under tau = (2 pi / |E0|)(1 - delta):
/// exp(-d pi^2 delta^2 / 2).
inline double detuned_survival(double delta, std::size_t d) {
    if (!(std::abs(delta) < 0.5)) {
        throw InvalidSizeError("detuned_survival: |delta| must be < 0.5");
    }
    const double pd = std::numbers::pi * delta;
    return std::exp(-static_cast<double>(d) * pd * pd / 2.0);
}

/// Detuning at which detuned_survival drops to `survival_floor`.
inline double detuning_tolerance(std::size_t d, double survival_floor) {
    if (d < 1 || !(survival_floor > 0.0 && survival_floor <= 1.0)) {
        throw InvalidSizeError("detuning_tolerance: need d >= 1 and 0 < floor <= 1");
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return std::sqrt(2.0 * std::log(1.0 / survival_floor) / (static_cast<double>(d) * pi2));
}

//----------------------------------------------------------------------------
// Filter execution
//----------------------------------------------------------------------------

enum class FilterMode { operator_exact, circuit_exact_u, circuit_trotter, mcmr_sampled };

inline std::string_view to_string(FilterMode m) {
    switch (m) {
    case FilterMode::operator_exact: return "operator-exact";
    case FilterMode::circuit_exact_u: return "circuit-exact-u";
    case FilterMode::circuit_trotter: return "circuit-trotter";
    case FilterMode::mcmr_sampled: return "mcmr-sampled";
    }
    return "?";
}

inline std::optional<FilterMode> parse_filter_mode(std::string_view s) {
    for (auto m : {FilterMode::operator_exact, FilterMode::circuit_exact_u,
                   FilterMode::circuit_trotter, FilterMode::mcmr_sampled}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

/// Which C-U realization an MCMR trajectory uses.
enum class PropagatorKind { exact, trotter };

struct FilterConfig {
    double tau = 1.0;
    std::size_t degree = 0;
    FilterMode mode = FilterMode::operator_exact;
    TrotterConfig trotter{};
    std::uint64_t seed = 0;
    PropagatorKind mcmr_propagator = PropagatorKind::exact;
    /// Shots for a per-step sampled energy; 0 disables sampling.
    std::size_t shots = 0;

    void validate() const {
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw InvalidSizeError("FilterConfig: tau must be positive and finite");
        }
        trotter.validate();
    }
};

struct StepResult {
    StateVector state;
    double branch_probability = 0.0;
    bool aborted = false;
};

struct TraceRecord {
    std::size_t step = 0;
    double energy = 0.0;
    double fidelity = 0.0;
    double cumulative_success_probability = 1.0;
    double sampled_energy = std::numeric_limits<double>::quiet_NaN();
    double sampled_stderr = std::numeric_limits<double>::quiet_NaN();
};

struct FilterTrace {
    std::string protocol = "filter";
    FilterConfig config;
    std::vector<TraceRecord> records;
    StateVector final_state;
    bool aborted = false;
    std::size_t abort_step = 0; // filter step whose ancilla read 1
    std::vector<std::string> warnings;
};

namespace detail {

/// Pauli-insertion noise attached to one trajectory.
struct TrajectoryNoise {
    NoiseModel model;
    Rng rng;

    void random_pauli(StateVector &joint, std::size_t qubit) {
        static const Gate1q *paulis[3] = {&gates::pauli_x, &gates::pauli_y, &gates::pauli_z};
        apply_gate(joint, qubit, *paulis[rng.below(3)]);
    }

    void after_1q(StateVector &joint, std::size_t qubit) {
        if (model.depolarizing_1q > 0.0 && rng.uniform() < model.depolarizing_1q) {
            random_pauli(joint, qubit);
        }
    }

    void after_controlled(StateVector &joint, std::size_t ancilla, std::uint64_t support) {
        if (!(model.depolarizing_2q > 0.0 && rng.uniform() < model.depolarizing_2q)) {
            return;
        }
        std::vector<std::size_t> involved{ancilla};
        for (std::uint64_t m = support; m != 0; m &= m - 1) {
            involved.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        }
        const auto q = involved[rng.below(involved.size())];
        random_pauli(joint, q);
    }

    int read(int outcome) {
        if (model.readout_flip > 0.0 && rng.uniform() < model.readout_flip) {
            return 1 - outcome;
        }
        return outcome;
    }
};

inline Propagator make_propagator(const Hamiltonian &h, const SpectralData &s,
                                  PropagatorKind kind, const TrotterConfig &trotter) {
    if (kind == PropagatorKind::exact) {
        return ExactPropagator{std::cref(s)};
    }
    return TrotterPropagator{std::cref(h), trotter};
}

/**
 * One ancilla round: attach |0>, H, C-U(tau), H, measure.
 *
 * Without `ancilla_rng` the outcome is post-selected to 0. With it, the
 * outcome is drawn from the branch probabilities and a 1 (as read, after any
 * readout flip) aborts.
 */
inline StepResult circuit_round(const StateVector &state, const Propagator &prop, double tau,
                                Rng *ancilla_rng, TrajectoryNoise *noise) {
    StateVector joint = attach_ancilla(state);
    const std::size_t anc = state.qubit_count();
    apply_gate(joint, anc, gates::hadamard);
    if (noise) {
        noise->after_1q(joint, anc);
    }
    const auto *tp = std::get_if<TrotterPropagator>(&prop);
    if (noise && tp) {
        const Hamiltonian &h = tp->hamiltonian.get();
        auto upper = joint.amplitudes().subspan(joint.dimension() / 2);
        trotter_product(upper, h, tau, tp->config, 0, [&](std::size_t j, std::uint64_t) {
            noise->after_controlled(joint, anc, h.terms()[j].string.support_mask());
        });
    } else {
        joint = controlled_evolve(std::move(joint), prop, tau);
    }
    apply_gate(joint, anc, gates::hadamard);
    if (noise) {
        noise->after_1q(joint, anc);
    }

    const std::size_t half = joint.dimension() / 2;
    if (ancilla_rng == nullptr) {
        auto proj = project(std::move(joint), anc, 0);
        return {drop_ancilla(proj.state), proj.probability, false};
    }
    double total = 0.0;
    double zero = 0.0;
    for (std::size_t i = 0; i < joint.dimension(); ++i) {
        const double w = std::norm(joint[i]);
        total += w;
        if (i < half) {
            zero += w;
        }
    }
    if (!(total >= kDegenerateNormSq)) {
        throw DegenerateStateError("filter_step: degenerate joint state");
    }
    const double p0 = zero / total;
    const int outcome = ancilla_rng->uniform() < p0 ? 0 : 1;
    const int observed = noise ? noise->read(outcome) : outcome;
    auto amps = joint.amplitudes();
    auto kept = outcome == 0 ? amps.first(half) : amps.subspan(half);
    StateVector next(anc, {kept.begin(), kept.end()});
    return {std::move(next), outcome == 0 ? p0 : 1.0 - p0, observed == 1};
}

inline StepResult operator_round(const StateVector &state, const SpectralData &s, double tau) {
    const double before = detail::require_nondegenerate(state, "filter_step");
    auto c = s.components(state.amplitudes());
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] *= 0.5 * (1.0 + std::polar(1.0, -s.eigenvalues[k] * tau));
    }
    StateVector out(state.qubit_count(), s.synthesize(c));
    const double p = std::min(1.0, out.squared_norm() / before);
    return {std::move(out), p, false};
}

inline void check_shapes(const StateVector &state, const Hamiltonian &h, const SpectralData &s) {
    require_register(state, h.qubit_count(), "filter_step");
    if (s.dimension() != state.dimension()) {
        throw ShapeError("filter_step: spectrum dimension does not match state");
    }
}

} // namespace detail

/**
 * One application of (I + e^{-iH tau}) / 2 to a system-register state.
 *
 * Returns the unnormalized result and the branch probability relative to the
 * input's squared norm. mcmr-sampled mode needs `ancilla_rng`; an ancilla
 * outcome of 1 comes back with `aborted` set.
 */
inline StepResult filter_step(const StateVector &state, const Hamiltonian &h,
                              const SpectralData &s, const FilterConfig &cfg,
                              Rng *ancilla_rng = nullptr) {
    cfg.validate();
    detail::check_shapes(state, h, s);
    StepResult r;
    switch (cfg.mode) {
    case FilterMode::operator_exact:
        r = detail::operator_round(state, s, cfg.tau);
        break;
    case FilterMode::circuit_exact_u:
        r = detail::circuit_round(state, ExactPropagator{std::cref(s)}, cfg.tau, nullptr, nullptr);
        break;
    case FilterMode::circuit_trotter:
        r = detail::circuit_round(state, TrotterPropagator{std::cref(h), cfg.trotter}, cfg.tau,
                                  nullptr, nullptr);
        break;
    case FilterMode::mcmr_sampled:
        if (ancilla_rng == nullptr) {
            throw std::invalid_argument("filter_step: mcmr-sampled mode needs a generator");
        }
        r = detail::circuit_round(
            state, detail::make_propagator(h, s, cfg.mcmr_propagator, cfg.trotter), cfg.tau,
            ancilla_rng, nullptr);
        break;
    }
    if (!r.aborted && !(r.state.squared_norm() >= kDegenerateNormSq)) {
        throw DegenerateStateError("filter_step: branch probability underflow");
    }
    return r;
}

namespace detail {

inline FilterTrace run_filter_impl(const StateVector &initial, const Hamiltonian &h,
                                   const SpectralData &s, const FilterConfig &cfg,
                                   const NoiseModel *noise_model) {
    cfg.validate();
    check_shapes(initial, h, s);
    const double n0 = require_nondegenerate(initial, "run_filter");

    FilterTrace trace;
    trace.config = cfg;
    const double gamma = ground_overlap(initial, s);
    if (gamma < 1e-6) {
        trace.warnings.push_back("initial ground overlap " + std::to_string(gamma) +
                                 " is below 1e-6");
    }

    const bool trajectory = cfg.mode == FilterMode::mcmr_sampled || noise_model != nullptr;
    Rng ancilla_rng(stream_seed(cfg.seed, StreamId::ancilla));
    std::optional<TrajectoryNoise> noise;
    if (noise_model != nullptr) {
        noise.emplace(TrajectoryNoise{*noise_model, Rng(stream_seed(cfg.seed, StreamId::noise))});
    }
    std::optional<ShotPlan> plan;
    if (cfg.shots > 0) {
        plan = plan_measurements(h, cfg.shots);
    }
    const double readout = noise_model ? noise_model->readout_flip : 0.0;

    Propagator prop = ExactPropagator{std::cref(s)};
    if (cfg.mode == FilterMode::circuit_trotter ||
        (cfg.mode == FilterMode::mcmr_sampled && cfg.mcmr_propagator == PropagatorKind::trotter)) {
        prop = TrotterPropagator{std::cref(h), cfg.trotter};
    }

    StateVector state = initial;
    double cumulative = 1.0;
    auto record = [&](std::size_t k) {
        TraceRecord r;
        r.step = k;
        r.energy = energy(state, h);
        r.fidelity = ground_overlap(state, s);
        r.cumulative_success_probability =
            trajectory ? cumulative : std::min(1.0, state.squared_norm() / n0);
        if (plan) {
            const auto e = sample_energy(normalized(state), h, *plan, step_seed(cfg.seed, k),
                                         readout);
            r.sampled_energy = e.mean;
            r.sampled_stderr = e.standard_error;
        }
        trace.records.push_back(r);
    };

    record(0);
    for (std::size_t k = 1; k <= cfg.degree; ++k) {
        StepResult r;
        if (trajectory) {
            r = circuit_round(state, prop, cfg.tau, &ancilla_rng, noise ? &*noise : nullptr);
        } else {
            r = filter_step(state, h, s, cfg);
        }
        if (r.aborted) {
            trace.aborted = true;
            trace.abort_step = k;
            break;
        }
        if (!(r.state.squared_norm() >= kDegenerateNormSq)) {
            throw DegenerateStateError("run_filter: branch probability underflow at step " +
                                       std::to_string(k));
        }
        cumulative *= r.branch_probability;
        state = std::move(r.state);
        record(k);
    }
    trace.final_state = std::move(state);
    return trace;
}

} // namespace detail

/// Applies filter_step `cfg.degree` times and records every intermediate state.
inline FilterTrace run_filter(const StateVector &initial, const Hamiltonian &h,
                              const SpectralData &s, const FilterConfig &cfg) {
    return detail::run_filter_impl(initial, h, s, cfg, nullptr);
}

} // namespace pcf
