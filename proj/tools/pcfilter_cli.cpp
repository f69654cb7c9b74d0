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

// Command-line driver: spectrum, convergence, advantage, noisy, detune.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical error.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "pcfilter/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config_path;
    std::string out;
    std::string hamiltonian_file;
    std::string mode;
    std::string degrees;
    std::uint64_t seed = 0;
    std::size_t shots = 0;
};

pcf::experiment::ExperimentConfig resolve(const CLI::App &app, const CLI::App &sub,
                                          const Overrides &o) {
    using namespace pcf::experiment;
    ExperimentConfig c;
    if (app.count("--config") > 0 || sub.count("--config") > 0) {
        c = load_config_file(o.config_path);
    }
    auto given = [&](const char *flag) { return app.count(flag) > 0 || sub.count(flag) > 0; };
    if (given("--out")) c.out = o.out;
    if (given("--hamiltonian-file")) c.hamiltonian_file = o.hamiltonian_file;
    if (given("--seed")) c.seed = o.seed;
    if (given("--shots")) c.shots = o.shots;
    if (given("--degrees")) c.degrees = parse_degrees(o.degrees);
    if (given("--mode")) {
        auto m = pcf::parse_filter_mode(o.mode);
        if (!m) {
            throw pcf::ConfigError("--mode: unknown filter mode '" + o.mode + "'");
        }
        c.mode = *m;
    }
    return c;
}

void add_common(CLI::App &cmd, Overrides &o) {
    cmd.add_option("--config", o.config_path, "JSON config file");
    cmd.add_option("--out", o.out, "output directory");
    cmd.add_option("--seed", o.seed, "root seed (required for sampled and noisy runs)");
    cmd.add_option("--hamiltonian-file", o.hamiltonian_file,
                   "Pauli-term file replacing the built-in XYZ chain");
    cmd.add_option("--mode", o.mode,
                   "operator-exact | circuit-exact-u | circuit-trotter | mcmr-sampled");
    cmd.add_option("--shots", o.shots, "total shots per energy estimate (0 disables sampling)");
    cmd.add_option("--degrees", o.degrees, "degree sweep, 'a..b' or 'a,b,c'");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Power-cosine ground-state filter experiments"};
    app.require_subcommand(1);
    Overrides o;
    add_common(app, o);

    const char *commands[][2] = {
        {"spectrum", "exact spectrum, gap, resonant tau and initial overlap"},
        {"convergence", "energy and fidelity vs filter degree, ideal and shot-sampled"},
        {"advantage", "infidelity vs circuit cost, filter against adiabatic preparation"},
        {"noisy", "trajectory-averaged energies under a parametric noise model"},
        {"detune", "ground survival under resonance detuning"},
    };
    for (auto &[name, help] : commands) {
        add_common(*app.add_subcommand(name, help), o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const CLI::App *sub = app.get_subcommands().front();
    try {
        const auto cfg = resolve(app, *sub, o);
        pcf::experiment::run_command(sub->get_name(), cfg);
    } catch (const pcf::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pcf::ParseError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pcf::NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return 0;
}
