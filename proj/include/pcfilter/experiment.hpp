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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcfilter/adiabatic.hpp"
#include "pcfilter/errors.hpp"
#include "pcfilter/filter.hpp"
#include "pcfilter/noisy.hpp"
#include "pcfilter/pauli_model.hpp"
#include "pcfilter/sampling.hpp"
#include "pcfilter/spectral.hpp"
#include "pcfilter/trace_io.hpp"

namespace pcf::experiment {

using nlohmann::json;

//----------------------------------------------------------------------------
// Configuration
//----------------------------------------------------------------------------

struct InitialStateSpec {
    enum class Kind { neel, uniform, basis };
    Kind kind = Kind::neel;
    std::size_t index = 0;
};

/// Neel basis index for n qubits: every even qubit set (0101 for n = 4).
inline std::size_t neel_index(std::size_t n) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < n; q += 2) {
        idx |= std::size_t{1} << q;
    }
    return idx;
}

struct ExperimentConfig {
    std::size_t n = 4;
    double jx = 1.0;
    double jy = 1.0;
    double jz = 0.5;
    double h = 0.0;
    std::optional<std::string> hamiltonian_file;
    InitialStateSpec initial_state{};
    std::optional<double> tau;
    bool auto_resonance = true;
    std::optional<std::vector<std::size_t>> degrees;
    FilterMode mode = FilterMode::operator_exact;
    TrotterConfig trotter{};
    std::size_t shots = 10000;
    std::size_t repetitions = 1;
    std::optional<std::uint64_t> seed;
    NoiseModel noise{};
    /// C-U compilation for the noisy command; coarser than `trotter` so
    /// trajectories survive long enough to show the noise floor.
    TrotterConfig noisy_trotter{2, 4};
    std::size_t trajectories = 40000;
    std::size_t shots_per_trajectory = 100;
    std::vector<double> detune_deltas = {0.0,   0.0025, 0.005,  0.0075, 0.01,
                                         0.0125, 0.015, 0.0175, 0.02};
    double survival_floor = 0.5;
    std::string out = "out";
};

/// Parses "a..b" (inclusive) or "a,b,c".
inline std::vector<std::size_t> parse_degrees(const std::string &text) {
    std::vector<std::size_t> out;
    auto to_size = [&](const std::string &tok) -> std::size_t {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != tok.size() || v < 0) {
            throw ConfigError("degrees: bad value '" + tok + "' in '" + text + "'");
        }
        return static_cast<std::size_t>(v);
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        const auto a = to_size(text.substr(0, dots));
        const auto b = to_size(text.substr(dots + 2));
        if (b < a) {
            throw ConfigError("degrees: empty range '" + text + "'");
        }
        for (std::size_t d = a; d <= b; ++d) {
            out.push_back(d);
        }
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(to_size(tok));
    }
    if (out.empty()) {
        throw ConfigError("degrees: empty list");
    }
    return out;
}

namespace detail {

template <class T> T get_field(const json &j, const std::string &key, const std::string &where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(where + key + ": " + e.what());
    }
}

inline void reject_unknown(const json &j, const std::set<std::string> &allowed,
                           const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + "expected a JSON object");
    }
    for (const auto &[k, v] : j.items()) {
        if (!allowed.contains(k)) {
            throw ConfigError("unknown config key '" + where + k + "'");
        }
    }
}

inline double probability(const json &j, const std::string &key, const std::string &where) {
    const auto p = get_field<double>(j, key, where);
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(where + key + ": must lie in [0, 1]");
    }
    return p;
}

} // namespace detail

inline InitialStateSpec parse_initial_state(const json &j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "neel") {
            return {InitialStateSpec::Kind::neel, 0};
        }
        if (s == "uniform") {
            return {InitialStateSpec::Kind::uniform, 0};
        }
        throw ConfigError("initial_state: expected \"neel\", \"uniform\" or a basis index");
    }
    if (j.is_number_unsigned()) {
        return {InitialStateSpec::Kind::basis, j.get<std::size_t>()};
    }
    throw ConfigError("initial_state: expected \"neel\", \"uniform\" or a basis index");
}

/// Reads a JSON config document on top of `base`. Unknown keys are errors.
inline ExperimentConfig parse_config(const json &j, ExperimentConfig base = {}) {
    using detail::get_field;
    detail::reject_unknown(
        j,
        {"n", "jx", "jy", "jz", "h", "hamiltonian_file", "initial_state", "tau",
         "auto_resonance", "degrees", "mode", "trotter", "shots", "repetitions", "seed", "noise",
         "noisy_trotter", "trajectories", "shots_per_trajectory", "detune_deltas",
         "survival_floor", "out"},
        "");
    ExperimentConfig c = std::move(base);
    if (j.contains("n")) c.n = get_field<std::size_t>(j, "n", "");
    if (j.contains("jx")) c.jx = get_field<double>(j, "jx", "");
    if (j.contains("jy")) c.jy = get_field<double>(j, "jy", "");
    if (j.contains("jz")) c.jz = get_field<double>(j, "jz", "");
    if (j.contains("h")) c.h = get_field<double>(j, "h", "");
    if (j.contains("hamiltonian_file") && !j["hamiltonian_file"].is_null()) {
        c.hamiltonian_file = get_field<std::string>(j, "hamiltonian_file", "");
    }
    if (j.contains("initial_state")) c.initial_state = parse_initial_state(j["initial_state"]);
    const bool has_tau = j.contains("tau") && !j["tau"].is_null();
    if (has_tau) {
        c.tau = get_field<double>(j, "tau", "");
        c.auto_resonance = false;
    }
    if (j.contains("auto_resonance")) {
        const bool ar = get_field<bool>(j, "auto_resonance", "");
        if (ar && has_tau) {
            throw ConfigError("tau and auto_resonance are mutually exclusive");
        }
        if (!ar && !c.tau) {
            throw ConfigError("auto_resonance is false but no tau given");
        }
        c.auto_resonance = ar;
        if (ar) {
            c.tau.reset();
        }
    }
    if (j.contains("degrees") && !j["degrees"].is_null()) {
        const auto &d = j["degrees"];
        if (d.is_string()) {
            c.degrees = parse_degrees(d.get<std::string>());
        } else {
            c.degrees = get_field<std::vector<std::size_t>>(j, "degrees", "");
        }
    }
    if (j.contains("mode")) {
        const auto m = get_field<std::string>(j, "mode", "");
        auto parsed = parse_filter_mode(m);
        if (!parsed) {
            throw ConfigError("mode: unknown filter mode '" + m + "'");
        }
        c.mode = *parsed;
    }
    for (auto [key, target] : {std::pair{"trotter", &c.trotter}, {"noisy_trotter", &c.noisy_trotter}}) {
        if (!j.contains(key)) {
            continue;
        }
        const auto &t = j[key];
        const std::string where = std::string(key) + ".";
        detail::reject_unknown(t, {"order", "substeps"}, where);
        if (t.contains("order")) target->order = get_field<int>(t, "order", where);
        if (t.contains("substeps")) target->substeps = get_field<std::size_t>(t, "substeps", where);
        try {
            target->validate();
        } catch (const InvalidSizeError &e) {
            throw ConfigError(where + e.what());
        }
    }
    if (j.contains("shots")) c.shots = get_field<std::size_t>(j, "shots", "");
    if (j.contains("repetitions")) c.repetitions = get_field<std::size_t>(j, "repetitions", "");
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = get_field<std::uint64_t>(j, "seed", "");
    if (j.contains("noise")) {
        const auto &nz = j["noise"];
        detail::reject_unknown(nz, {"depolarizing_2q", "depolarizing_1q", "readout_flip"},
                               "noise.");
        if (nz.contains("depolarizing_2q")) {
            c.noise.depolarizing_2q = detail::probability(nz, "depolarizing_2q", "noise.");
        }
        if (nz.contains("depolarizing_1q")) {
            c.noise.depolarizing_1q = detail::probability(nz, "depolarizing_1q", "noise.");
        }
        if (nz.contains("readout_flip")) {
            c.noise.readout_flip = detail::probability(nz, "readout_flip", "noise.");
        }
    }
    if (j.contains("trajectories")) {
        c.trajectories = get_field<std::size_t>(j, "trajectories", "");
    }
    if (j.contains("shots_per_trajectory")) {
        c.shots_per_trajectory = get_field<std::size_t>(j, "shots_per_trajectory", "");
    }
    if (j.contains("detune_deltas")) {
        c.detune_deltas = get_field<std::vector<double>>(j, "detune_deltas", "");
    }
    if (j.contains("survival_floor")) {
        c.survival_floor = get_field<double>(j, "survival_floor", "");
    }
    if (j.contains("out")) c.out = get_field<std::string>(j, "out", "");
    return c;
}

inline ExperimentConfig load_config_file(const std::string &path, ExperimentConfig base = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_config(j, std::move(base));
}

inline json initial_state_json(const InitialStateSpec &s) {
    switch (s.kind) {
    case InitialStateSpec::Kind::neel: return "neel";
    case InitialStateSpec::Kind::uniform: return "uniform";
    case InitialStateSpec::Kind::basis: return s.index;
    }
    return nullptr;
}

/// Every field, defaults included, in the same schema parse_config reads.
inline json to_json(const ExperimentConfig &c) {
    json j = {{"n", c.n},
              {"jx", c.jx},
              {"jy", c.jy},
              {"jz", c.jz},
              {"h", c.h},
              {"hamiltonian_file", c.hamiltonian_file ? json(*c.hamiltonian_file) : json()},
              {"initial_state", initial_state_json(c.initial_state)},
              {"tau", c.tau ? json(*c.tau) : json()},
              {"auto_resonance", c.auto_resonance},
              {"degrees", c.degrees ? json(*c.degrees) : json()},
              {"mode", std::string(to_string(c.mode))},
              {"trotter", pcf::to_json(c.trotter)},
              {"noisy_trotter", pcf::to_json(c.noisy_trotter)},
              {"shots", c.shots},
              {"repetitions", c.repetitions},
              {"seed", c.seed ? json(*c.seed) : json()},
              {"noise",
               {{"depolarizing_2q", c.noise.depolarizing_2q},
                {"depolarizing_1q", c.noise.depolarizing_1q},
                {"readout_flip", c.noise.readout_flip}}},
              {"trajectories", c.trajectories},
              {"shots_per_trajectory", c.shots_per_trajectory},
              {"detune_deltas", c.detune_deltas},
              {"survival_floor", c.survival_floor},
              {"out", c.out}};
    return j;
}

//----------------------------------------------------------------------------
// Model setup
//----------------------------------------------------------------------------

struct Model {
    Hamiltonian hamiltonian;
    SpectralData spectrum;
    StateVector initial;
};

inline Hamiltonian build_hamiltonian(const ExperimentConfig &c) {
    if (c.hamiltonian_file) {
        std::ifstream in(*c.hamiltonian_file);
        if (!in) {
            throw ConfigError("cannot open hamiltonian file '" + *c.hamiltonian_file + "'");
        }
        try {
            return parse_hamiltonian(in);
        } catch (const ParseError &e) {
            throw ConfigError("hamiltonian file '" + *c.hamiltonian_file + "': " + e.what());
        }
    }
    if (c.n < 1) {
        throw ConfigError("n: must be >= 1");
    }
    if (c.n > kMaxDenseQubits) {
        throw ConfigError("n: exceeds the dense cap of " + std::to_string(kMaxDenseQubits));
    }
    if (c.n == 1) {
        // A single site has no couplings; only the field survives.
        return Hamiltonian(1, {{c.h, PauliString::sparse(1, {{0, Pauli::Z}})}});
    }
    return build_heisenberg_xyz(c.n, c.jx, c.jy, c.jz, c.h);
}

inline StateVector build_initial_state(const InitialStateSpec &spec, std::size_t n) {
    switch (spec.kind) {
    case InitialStateSpec::Kind::neel: return init_basis(n, neel_index(n));
    case InitialStateSpec::Kind::uniform: return init_uniform(n);
    case InitialStateSpec::Kind::basis:
        if (spec.index >= (std::size_t{1} << n)) {
            throw ConfigError("initial_state: basis index out of range");
        }
        return init_basis(n, spec.index);
    }
    throw ConfigError("initial_state: unknown kind");
}

inline Model build_model(const ExperimentConfig &c) {
    Hamiltonian h = build_hamiltonian(c);
    if (h.qubit_count() > kMaxDenseQubits) {
        throw ConfigError("hamiltonian exceeds the dense cap of " +
                          std::to_string(kMaxDenseQubits) + " qubits");
    }
    SpectralData s = diagonalize(h);
    StateVector init = build_initial_state(c.initial_state, h.qubit_count());
    return {std::move(h), std::move(s), std::move(init)};
}

/// The configured tau, or the resonance value (throws if E0 ~ 0).
inline double resolve_tau(const ExperimentConfig &c, const Model &m) {
    if (c.tau) {
        if (!(*c.tau > 0.0)) {
            throw ConfigError("tau: must be positive");
        }
        return *c.tau;
    }
    return resonance_tau(m.spectrum.eigenvalues.front());
}

inline std::vector<std::size_t> resolve_degrees(const ExperimentConfig &c,
                                                std::size_t default_lo,
                                                std::size_t default_hi) {
    if (c.degrees) {
        auto d = *c.degrees;
        if (d.empty()) {
            throw ConfigError("degrees: empty sweep");
        }
        return d;
    }
    std::vector<std::size_t> d;
    for (std::size_t k = default_lo; k <= default_hi; ++k) {
        d.push_back(k);
    }
    return d;
}

inline std::uint64_t require_seed(const ExperimentConfig &c, const char *cmd) {
    if (!c.seed) {
        throw ConfigError(std::string(cmd) + ": a seed is required (--seed or \"seed\")");
    }
    return *c.seed;
}

inline bool is_deterministic(FilterMode m) { return m != FilterMode::mcmr_sampled; }

//----------------------------------------------------------------------------
// spectrum
//----------------------------------------------------------------------------

struct SpectrumReport {
    std::vector<double> eigenvalues;
    double e0 = 0.0;
    double gap = 0.0;
    bool gap_degenerate = false;
    std::optional<double> tau; // empty when E0 ~ 0 and no override
    double gamma = 0.0;
};

inline SpectrumReport run_spectrum(const ExperimentConfig &c) {
    const Model m = build_model(c);
    SpectrumReport r;
    r.eigenvalues = m.spectrum.eigenvalues;
    r.e0 = r.eigenvalues.front();
    if (m.spectrum.dimension() >= 2) {
        const auto g = spectral_gap(m.spectrum);
        r.gap = g.gap;
        r.gap_degenerate = g.degenerate;
    }
    try {
        r.tau = resolve_tau(c, m);
    } catch (const ResonanceUndefinedError &) {
        r.tau.reset();
    }
    r.gamma = ground_overlap(m.initial, m.spectrum);
    return r;
}

inline json to_json(const SpectrumReport &r) {
    return {{"eigenvalues", r.eigenvalues},
            {"e0", r.e0},
            {"gap", r.gap},
            {"gap_degenerate", r.gap_degenerate},
            {"tau", r.tau ? json(*r.tau) : json()},
            {"gamma", r.gamma}};
}

//----------------------------------------------------------------------------
// convergence
//----------------------------------------------------------------------------

struct ConvergenceRow {
    std::size_t degree = 0;
    double ideal_energy = 0.0;
    double ideal_fidelity = 0.0;
    double cumulative_success_prob = 1.0;
    double sampled_energy = std::numeric_limits<double>::quiet_NaN();
    double sampled_stderr = std::numeric_limits<double>::quiet_NaN();
    /// Fraction of repetitions with |sampled - ideal| < 3 stderr (repetitions > 1).
    double coverage_3sigma = std::numeric_limits<double>::quiet_NaN();
};

/// Seed of sampling repetition `rep` at degree `d`.
inline std::uint64_t sampling_seed(std::uint64_t root, std::size_t d, std::size_t rep) {
    return stream_seed(stream_seed(root, 4096 + d), rep);
}

/**
 * Ideal statevector filter at every requested degree plus shot-sampled
 * energies of the same (normalized) state.
 */
inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig &c) {
    if (!is_deterministic(c.mode)) {
        throw ConfigError("convergence: mode must be operator-exact, circuit-exact-u or "
                          "circuit-trotter");
    }
    const Model m = build_model(c);
    const double tau = resolve_tau(c, m);
    auto degrees = resolve_degrees(c, 0, 160);
    std::uint64_t seed = 0;
    std::optional<ShotPlan> plan;
    if (c.shots > 0) {
        seed = require_seed(c, "convergence");
        plan = plan_measurements(m.hamiltonian, c.shots);
        if (c.repetitions < 1) {
            throw ConfigError("repetitions: must be >= 1");
        }
    }

    FilterConfig fc;
    fc.tau = tau;
    fc.mode = c.mode;
    fc.trotter = c.trotter;
    const std::size_t dmax = *std::max_element(degrees.begin(), degrees.end());
    std::vector<StateVector> states{m.initial};
    states.reserve(dmax + 1);
    for (std::size_t k = 1; k <= dmax; ++k) {
        states.push_back(filter_step(states.back(), m.hamiltonian, m.spectrum, fc).state);
    }
    const double n0 = m.initial.squared_norm();

    std::vector<ConvergenceRow> rows;
    for (auto d : degrees) {
        const auto &psi = states[d];
        ConvergenceRow r;
        r.degree = d;
        r.ideal_energy = energy(psi, m.hamiltonian);
        r.ideal_fidelity = ground_overlap(psi, m.spectrum);
        r.cumulative_success_prob = std::min(1.0, psi.squared_norm() / n0);
        if (plan) {
            const StateVector unit = normalized(psi);
            std::size_t hits = 0;
            for (std::size_t rep = 0; rep < c.repetitions; ++rep) {
                const auto e = sample_energy(unit, m.hamiltonian, *plan, sampling_seed(seed, d, rep));
                if (rep == 0) {
                    r.sampled_energy = e.mean;
                    r.sampled_stderr = e.standard_error;
                }
                if (std::abs(e.mean - r.ideal_energy) < 3.0 * e.standard_error) {
                    ++hits;
                }
            }
            if (c.repetitions > 1) {
                r.coverage_3sigma =
                    static_cast<double>(hits) / static_cast<double>(c.repetitions);
            }
        }
        rows.push_back(r);
    }
    return rows;
}

//----------------------------------------------------------------------------
// advantage
//----------------------------------------------------------------------------

struct AdvantageRow {
    std::string protocol;
    std::size_t cost = 0;
    double infidelity = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through (x, y).
inline LinearFit linear_fit(const std::vector<double> &x, const std::vector<double> &y) {
    LinearFit f;
    f.points = x.size();
    if (x.size() < 2 || x.size() != y.size()) {
        return f;
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

struct AdvantageSummary {
    std::optional<std::size_t> crossover_cost; // smallest cost from which filter wins at every cost
    std::size_t fit_from_cost = 0;             // start of the post-transient fit window
    LinearFit filter_fit;                      // log10(infidelity) vs cost
    LinearFit tasp_fit;
};

struct AdvantageResult {
    std::vector<AdvantageRow> rows; // filter rows then tasp rows, cost ascending
    AdvantageSummary summary;
};

inline AdvantageSummary summarize_advantage(const std::vector<AdvantageRow> &rows) {
    std::vector<std::pair<std::size_t, double>> filt;
    std::vector<std::pair<std::size_t, double>> tasp;
    for (const auto &r : rows) {
        (r.protocol == "filter" ? filt : tasp).emplace_back(r.cost, r.infidelity);
    }
    AdvantageSummary s;
    if (filt.empty() || filt.size() != tasp.size()) {
        return s;
    }
    std::optional<std::size_t> cross;
    for (std::size_t i = filt.size(); i-- > 0;) {
        if (filt[i].second < tasp[i].second) {
            cross = filt[i].first;
        } else {
            break;
        }
    }
    s.crossover_cost = cross;
    // Post-transient window: the upper half of the cost sweep.
    s.fit_from_cost = filt.back().first / 2;
    auto fit = [&](const auto &pts) {
        std::vector<double> x;
        std::vector<double> y;
        for (auto [c, inf] : pts) {
            if (c >= s.fit_from_cost && inf > 0.0) {
                x.push_back(static_cast<double>(c));
                y.push_back(std::log10(inf));
            }
        }
        return linear_fit(x, y);
    };
    s.filter_fit = fit(filt);
    s.tasp_fit = fit(tasp);
    return s;
}

/**
 * Filter degree d against TASP with M = d Trotterized windows of length tau
 * (T = M tau), so each unit of cost holds one evolution window.
 */
inline AdvantageResult run_advantage(const ExperimentConfig &c) {
    const Model m = build_model(c);
    const double tau = resolve_tau(c, m);
    auto costs = resolve_degrees(c, 0, 150);
    std::sort(costs.begin(), costs.end());
    costs.erase(std::unique(costs.begin(), costs.end()), costs.end());

    FilterConfig fc;
    fc.tau = tau;
    fc.mode = is_deterministic(c.mode) ? c.mode : FilterMode::operator_exact;
    fc.trotter = c.trotter;
    fc.degree = costs.back();
    const auto trace = run_filter(m.initial, m.hamiltonian, m.spectrum, fc);

    AdvantageResult res;
    for (auto d : costs) {
        res.rows.push_back({"filter", d, 1.0 - trace.records[d].fidelity});
    }
    const std::size_t n = m.hamiltonian.qubit_count();
    for (auto M : costs) {
        double inf = 0.0;
        if (M == 0) {
            inf = 1.0 - ground_overlap(plus_state(n), m.spectrum);
        } else {
            const auto tr = run_tasp(m.hamiltonian, m.spectrum,
                                     default_tasp_config(n, tau, M, c.trotter));
            inf = 1.0 - tr.records.back().fidelity;
        }
        res.rows.push_back({"tasp", M, inf});
    }
    res.summary = summarize_advantage(res.rows);
    return res;
}

inline json to_json(const AdvantageSummary &s) {
    auto fit = [](const LinearFit &f) {
        return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
                    {"points", f.points}};
    };
    return {{"crossover_cost", s.crossover_cost ? json(*s.crossover_cost) : json()},
            {"fit_from_cost", s.fit_from_cost},
            {"filter_log10_fit", fit(s.filter_fit)},
            {"tasp_log10_fit", fit(s.tasp_fit)}};
}

//----------------------------------------------------------------------------
// noisy
//----------------------------------------------------------------------------

struct NoisyRow {
    NoisyPoint point;
    double ideal_energy = 0.0;     // operator-exact
    double noiseless_energy = 0.0; // same circuit, noise off
};

/**
 * Trajectory-averaged energies under the NoiseModel, circuit-trotter C-U,
 * next to the noiseless operator-exact energy.
 */
inline std::vector<NoisyRow> run_noisy(const ExperimentConfig &c) {
    const std::uint64_t seed = require_seed(c, "noisy");
    const Model m = build_model(c);
    const double tau = resolve_tau(c, m);
    const auto degrees = resolve_degrees(c, 0, 20);
    if (c.trajectories < 1) {
        throw ConfigError("trajectories: must be >= 1");
    }
    c.noise.validate();

    FilterConfig fc;
    fc.tau = tau;
    fc.mode = FilterMode::circuit_trotter;
    fc.trotter = c.noisy_trotter;
    fc.shots = c.shots_per_trajectory;
    fc.degree = *std::max_element(degrees.begin(), degrees.end());
    const auto curve = average_noisy_trajectories(m.initial, m.hamiltonian, m.spectrum, fc,
                                                  c.noise, c.trajectories, seed);
    FilterConfig ideal = fc;
    ideal.mode = FilterMode::operator_exact;
    ideal.shots = 0;
    const auto ideal_trace = run_filter(m.initial, m.hamiltonian, m.spectrum, ideal);
    ideal.mode = FilterMode::circuit_trotter;
    const auto noiseless_trace = run_filter(m.initial, m.hamiltonian, m.spectrum, ideal);

    std::vector<NoisyRow> rows;
    for (auto d : degrees) {
        rows.push_back({curve[d], ideal_trace.records[d].energy,
                        noiseless_trace.records[d].energy});
    }
    return rows;
}

//----------------------------------------------------------------------------
// detune
//----------------------------------------------------------------------------

struct DetuneRow {
    double delta = 0.0;
    std::size_t degree = 0;
    double exact_survival = 1.0;  // |f(E0)|^{2d} at the detuned tau
    double approx_survival = 1.0; // exp(-d pi^2 delta^2)
    double relative_error = 0.0;
};

struct ToleranceRow {
    std::size_t degree = 0;
    double delta_star = 0.0;
};

struct DetuneResult {
    std::vector<DetuneRow> grid;
    std::vector<ToleranceRow> tolerance;
};

inline DetuneResult run_detune(const ExperimentConfig &c) {
    const Model m = build_model(c);
    const double e0 = m.spectrum.eigenvalues.front();
    const double tau0 = resonance_tau(e0);
    const auto degrees = resolve_degrees(c, 1, 100);
    if (!(c.survival_floor > 0.0 && c.survival_floor <= 1.0)) {
        throw ConfigError("survival_floor: must lie in (0, 1]");
    }
    DetuneResult res;
    for (double delta : c.detune_deltas) {
        if (!(std::abs(delta) < 0.5)) {
            throw ConfigError("detune_deltas: |delta| must be < 0.5");
        }
        const double tau = tau0 * (1.0 - delta);
        for (auto d : degrees) {
            DetuneRow r;
            r.delta = delta;
            r.degree = d;
            r.exact_survival = std::norm(predicted_amplitude(e0, tau, d));
            const double amp = detuned_survival(delta, d);
            r.approx_survival = amp * amp;
            r.relative_error = std::abs(r.exact_survival - r.approx_survival) / r.exact_survival;
            res.grid.push_back(r);
        }
    }
    for (auto d : degrees) {
        if (d >= 1) {
            res.tolerance.push_back({d, detuning_tolerance(d, c.survival_floor)});
        }
    }
    return res;
}

//----------------------------------------------------------------------------
// Output
//----------------------------------------------------------------------------

/// Creates `dir` and proves it is writable before any computation starts.
inline void prepare_output_dir(const std::string &dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = fs::path(dir) / ".pcfilter_write_probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "ok")) {
            throw ConfigError("output directory '" + dir + "' is not writable");
        }
    }
    fs::remove(probe, ec);
}

class OutputWriter {
  public:
    OutputWriter(std::string dir, std::string command, json resolved)
        : dir_(std::move(dir)), command_(std::move(command)), resolved_(std::move(resolved)) {}

    /// Writes `name` and its `<name>.config.json` sidecar.
    void write(const std::string &name, const std::string &content) const {
        namespace fs = std::filesystem;
        write_file(fs::path(dir_) / name, content);
        const json sidecar = {{"command", command_}, {"output", name}, {"config", resolved_}};
        write_file(fs::path(dir_) / (name + ".config.json"), sidecar.dump(2) + "\n");
    }

  private:
    static void write_file(const std::filesystem::path &p, const std::string &content) {
        std::ofstream f(p, std::ios::binary);
        f << content;
        if (!f) {
            throw std::runtime_error("failed to write '" + p.string() + "'");
        }
    }

    std::string dir_;
    std::string command_;
    json resolved_;
};

inline std::string convergence_csv(const std::vector<ConvergenceRow> &rows, bool sampled,
                                   bool coverage) {
    std::ostringstream os;
    CsvRow header;
    header << "degree" << "ideal_energy" << "ideal_fidelity";
    if (sampled) {
        header << "sampled_energy" << "sampled_stderr";
    }
    header << "cumulative_success_prob";
    if (coverage) {
        header << "coverage_3sigma";
    }
    os << header;
    for (const auto &r : rows) {
        CsvRow row;
        row << r.degree << r.ideal_energy << r.ideal_fidelity;
        if (sampled) {
            row << r.sampled_energy << r.sampled_stderr;
        }
        row << r.cumulative_success_prob;
        if (coverage) {
            row << r.coverage_3sigma;
        }
        os << row;
    }
    return os.str();
}

inline std::string advantage_csv(const std::vector<AdvantageRow> &rows) {
    std::ostringstream os;
    os << (CsvRow() << "protocol" << "cost" << "infidelity");
    for (const auto &r : rows) {
        os << (CsvRow() << r.protocol << r.cost << r.infidelity);
    }
    return os.str();
}

inline std::string noisy_csv(const std::vector<NoisyRow> &rows) {
    std::ostringstream os;
    os << (CsvRow() << "step" << "mean_energy" << "stderr" << "abort_rate" << "n_trajectories"
                    << "ideal_energy" << "noiseless_energy");
    for (const auto &r : rows) {
        os << (CsvRow() << r.point.step << r.point.mean_energy << r.point.stderr_energy
                        << r.point.abort_rate << r.point.n_trajectories << r.ideal_energy
                        << r.noiseless_energy);
    }
    return os.str();
}

inline std::string detune_csv(const std::vector<DetuneRow> &rows) {
    std::ostringstream os;
    os << (CsvRow() << "delta" << "degree" << "exact_survival" << "approx_survival"
                    << "relative_error");
    for (const auto &r : rows) {
        os << (CsvRow() << r.delta << r.degree << r.exact_survival << r.approx_survival
                        << r.relative_error);
    }
    return os.str();
}

inline std::string tolerance_csv(const std::vector<ToleranceRow> &rows) {
    std::ostringstream os;
    os << (CsvRow() << "degree" << "delta_star");
    for (const auto &r : rows) {
        os << (CsvRow() << r.degree << r.delta_star);
    }
    return os.str();
}

/// Resolved config plus the values a command derived (tau, sweep).
inline json resolved_config(const ExperimentConfig &c, const std::string &command,
                            std::optional<double> tau, const std::vector<std::size_t> &sweep) {
    json j = to_json(c);
    j["command"] = command;
    j["resolved_tau"] = tau ? json(*tau) : json();
    j["resolved_degrees"] = sweep;
    return j;
}

/// Runs one subcommand and writes its files into c.out.
inline void run_command(const std::string &command, const ExperimentConfig &c) {
    prepare_output_dir(c.out);
    if (command == "spectrum") {
        const auto r = run_spectrum(c);
        OutputWriter w(c.out, command, resolved_config(c, command, r.tau, {}));
        w.write("spectrum.json", to_json(r).dump(2) + "\n");
        return;
    }
    if (command == "convergence") {
        const auto rows = run_convergence(c);
        std::vector<std::size_t> sweep;
        for (const auto &r : rows) {
            sweep.push_back(r.degree);
        }
        const Model m = build_model(c);
        OutputWriter w(c.out, command, resolved_config(c, command, resolve_tau(c, m), sweep));
        w.write("convergence.csv", convergence_csv(rows, c.shots > 0, c.shots > 0 && c.repetitions > 1));

        FilterConfig fc;
        fc.tau = resolve_tau(c, m);
        fc.mode = c.mode;
        fc.trotter = c.trotter;
        fc.degree = *std::max_element(sweep.begin(), sweep.end());
        const auto trace = run_filter(m.initial, m.hamiltonian, m.spectrum, fc);
        w.write("filter_trace.json", to_json(trace).dump(2) + "\n");
        return;
    }
    if (command == "advantage") {
        const auto res = run_advantage(c);
        std::vector<std::size_t> sweep;
        for (const auto &r : res.rows) {
            if (r.protocol == "filter") {
                sweep.push_back(r.cost);
            }
        }
        const Model m = build_model(c);
        OutputWriter w(c.out, command, resolved_config(c, command, resolve_tau(c, m), sweep));
        w.write("advantage.csv", advantage_csv(res.rows));
        w.write("advantage_summary.json", to_json(res.summary).dump(2) + "\n");
        return;
    }
    if (command == "noisy") {
        const auto rows = run_noisy(c);
        std::vector<std::size_t> sweep;
        for (const auto &r : rows) {
            sweep.push_back(r.point.step);
        }
        const Model m = build_model(c);
        OutputWriter w(c.out, command, resolved_config(c, command, resolve_tau(c, m), sweep));
        w.write("noisy.csv", noisy_csv(rows));
        return;
    }
    if (command == "detune") {
        const auto res = run_detune(c);
        std::vector<std::size_t> sweep;
        for (const auto &t : res.tolerance) {
            sweep.push_back(t.degree);
        }
        const Model m = build_model(c);
        OutputWriter w(c.out, command,
                       resolved_config(c, command, resonance_tau(m.spectrum.eigenvalues.front()),
                                       sweep));
        w.write("detune.csv", detune_csv(res.grid));
        w.write("detune_tolerance.csv", tolerance_csv(res.tolerance));
        return;
    }
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace pcf::experiment
