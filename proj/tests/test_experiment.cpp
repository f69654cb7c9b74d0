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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcfilter/experiment.hpp"
#include "test_helpers.hpp"

using namespace pcf;
using namespace pcf::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const auto p = fs::temp_directory_path() / ("pcfilter_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(PCF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST(ParseDegrees, RangesAndLists) {
    EXPECT_EQ(parse_degrees("0..3"), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(parse_degrees("5"), (std::vector<std::size_t>{5}));
    EXPECT_EQ(parse_degrees("1,10,30"), (std::vector<std::size_t>{1, 10, 30}));
    EXPECT_THROW(parse_degrees("3..1"), ConfigError);
    EXPECT_THROW(parse_degrees("a..b"), ConfigError);
    EXPECT_THROW(parse_degrees("1,-2"), ConfigError);
    EXPECT_THROW(parse_degrees(""), ConfigError);
}

TEST(ParseConfig, DefaultsMatchBenchmark) {
    const ExperimentConfig c = parse_config(json::object());
    EXPECT_EQ(c.n, 4u);
    EXPECT_EQ(c.jx, 1.0);
    EXPECT_EQ(c.jy, 1.0);
    EXPECT_EQ(c.jz, 0.5);
    EXPECT_EQ(c.h, 0.0);
    EXPECT_TRUE(c.auto_resonance);
    EXPECT_FALSE(c.tau.has_value());
    EXPECT_EQ(c.shots, 10000u);
    EXPECT_EQ(c.trotter.order, 2);
    EXPECT_EQ(c.trotter.substeps, 8u);
    EXPECT_EQ(c.noise.depolarizing_2q, 5e-3);
    EXPECT_EQ(c.noise.depolarizing_1q, 2e-4);
    EXPECT_EQ(c.noise.readout_flip, 1e-2);
}

TEST(ParseConfig, ReadsFields) {
    const auto c = parse_config(json::parse(R"({
        "n": 3, "jz": 0.25, "tau": 0.9, "degrees": "2..4", "mode": "circuit-trotter",
        "trotter": {"order": 1, "substeps": 3}, "seed": 17, "initial_state": 6,
        "noise": {"readout_flip": 0.0}
    })"));
    EXPECT_EQ(c.n, 3u);
    EXPECT_EQ(c.jz, 0.25);
    EXPECT_EQ(c.tau, 0.9);
    EXPECT_FALSE(c.auto_resonance);
    EXPECT_EQ(*c.degrees, (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_EQ(c.mode, FilterMode::circuit_trotter);
    EXPECT_EQ(c.trotter.order, 1);
    EXPECT_EQ(c.trotter.substeps, 3u);
    EXPECT_EQ(c.seed, 17u);
    EXPECT_EQ(c.initial_state.kind, InitialStateSpec::Kind::basis);
    EXPECT_EQ(c.initial_state.index, 6u);
    EXPECT_EQ(c.noise.readout_flip, 0.0);
    EXPECT_EQ(c.noise.depolarizing_2q, 5e-3);
}

TEST(ParseConfig, RejectsUnknownKeysAtEveryLevel) {
    EXPECT_THROW(parse_config(json::parse(R"({"shot": 10})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"trotter": {"steps": 4}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"noise": {"depolarising_2q": 0.1}})")), ConfigError);
}

TEST(ParseConfig, RejectsBadValues) {
    EXPECT_THROW(parse_config(json::parse(R"({"tau": 1.0, "auto_resonance": true})")),
                 ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"auto_resonance": false})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "fast"})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"n": "four"})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"noise": {"readout_flip": 2}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"trotter": {"order": 3}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"initial_state": "ghz"})")), ConfigError);
}

TEST(ParseConfig, JsonRoundTrip) {
    auto c = parse_config(json::parse(R"({"n": 5, "degrees": [1, 7], "seed": 3})"));
    const auto back = parse_config(to_json(c));
    EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

TEST(Spectrum, BenchmarkDefaults) {
    const auto r = run_spectrum(ExperimentConfig{});
    EXPECT_NEAR(r.e0, -5.4243, 5e-4);
    ASSERT_TRUE(r.tau.has_value());
    EXPECT_NEAR(*r.tau, 1.1583, 1e-4);
    EXPECT_NEAR(r.gap, pcf::testing::kBenchGap, 1e-10);
    EXPECT_NEAR(r.gamma, pcf::testing::kBenchGamma, 1e-10);
    EXPECT_GT(r.gap, 0.0);
    EXPECT_GT(r.gamma, 0.0);
    const auto j = to_json(r);
    for (const char *key : {"eigenvalues", "e0", "gap", "tau", "gamma"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
}

TEST(Spectrum, SingleQubitField) {
    ExperimentConfig c;
    c.n = 1;
    c.h = 1.0;
    const auto r = run_spectrum(c);
    ASSERT_EQ(r.eigenvalues.size(), 2u);
    EXPECT_NEAR(r.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(r.eigenvalues[1], 1.0, 1e-14);
}

TEST(Convergence, IdealColumns) {
    ExperimentConfig c;
    c.shots = 0;
    c.degrees = parse_degrees("0..60");
    const auto rows = run_convergence(c);
    ASSERT_EQ(rows.size(), 61u);
    EXPECT_NEAR(rows[0].ideal_energy, energy(init_basis(4, 5), pcf::testing::benchmark_hamiltonian()),
                1e-14);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_GE(rows[k].ideal_fidelity, rows[k - 1].ideal_fidelity - 1e-12);
    }
    EXPECT_TRUE(std::isnan(rows[0].sampled_energy));
    const auto csv = convergence_csv(rows, false, false);
    EXPECT_EQ(lines_of(csv).front(), "degree,ideal_energy,ideal_fidelity,cumulative_success_prob");
}

TEST(Convergence, DefaultSweepReachesHighFidelity) {
    ExperimentConfig c;
    c.shots = 0;
    const auto rows = run_convergence(c);
    EXPECT_GT(rows.back().ideal_fidelity, 0.999);
}

TEST(Convergence, SampledColumnsNeedSeed) {
    ExperimentConfig c;
    c.degrees = parse_degrees("0..2");
    EXPECT_THROW(run_convergence(c), ConfigError);
    c.seed = 4;
    const auto rows = run_convergence(c);
    EXPECT_FALSE(std::isnan(rows[1].sampled_energy));
    EXPECT_GT(rows[1].sampled_stderr, 0.0);
    const auto header = lines_of(convergence_csv(rows, true, false)).front();
    EXPECT_EQ(header,
              "degree,ideal_energy,ideal_fidelity,sampled_energy,sampled_stderr,"
              "cumulative_success_prob");
}

TEST(Convergence, RejectsMcmrMode) {
    ExperimentConfig c;
    c.mode = FilterMode::mcmr_sampled;
    EXPECT_THROW(run_convergence(c), ConfigError);
}

TEST(Advantage, CostZeroRowsAndOrdering) {
    ExperimentConfig c;
    c.degrees = parse_degrees("0..60");
    const auto res = run_advantage(c);
    ASSERT_EQ(res.rows.size(), 122u);
    EXPECT_EQ(res.rows[0].protocol, "filter");
    EXPECT_EQ(res.rows[0].cost, 0u);
    EXPECT_NEAR(res.rows[0].infidelity, 1.0 - pcf::testing::kBenchGamma, 1e-10);
    EXPECT_EQ(res.rows[61].protocol, "tasp");
    EXPECT_EQ(res.rows[61].cost, 0u);
    const auto s = diagonalize(pcf::testing::benchmark_hamiltonian());
    EXPECT_NEAR(res.rows[61].infidelity, 1.0 - ground_overlap(plus_state(4), s), 1e-12);
    ASSERT_TRUE(res.summary.crossover_cost.has_value());
}

TEST(Advantage, LinearFitOnExactLine) {
    const auto f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_NEAR(f.slope, 2.0, 1e-15);
    EXPECT_NEAR(f.intercept, 1.0, 1e-15);
    EXPECT_NEAR(f.r2, 1.0, 1e-15);
}

TEST(Detune, GridAndTolerance) {
    ExperimentConfig c;
    const auto res = run_detune(c);
    ASSERT_FALSE(res.grid.empty());
    for (const auto &r : res.grid) {
        if (r.delta == 0.0) {
            EXPECT_NEAR(r.exact_survival, 1.0, 1e-12);
            EXPECT_EQ(r.approx_survival, 1.0);
        }
        EXPECT_LE(r.relative_error, 0.02);
    }
    ASSERT_EQ(res.tolerance.size(), 100u);
    EXPECT_NEAR(res.tolerance[3].delta_star / res.tolerance[15].delta_star, 2.0, 1e-9);
}

TEST(Noisy, ZeroNoiseTracksIdeal) {
    ExperimentConfig c;
    c.seed = 8;
    c.noise = NoiseModel::none();
    c.trajectories = 300;
    c.degrees = parse_degrees("0..10");
    const auto rows = run_noisy(c);
    ASSERT_EQ(rows.size(), 11u);
    for (const auto &r : rows) {
        EXPECT_LE(std::abs(r.point.mean_energy - r.noiseless_energy), 3.0 * r.point.stderr_energy)
            << "d=" << r.point.step;
        EXPECT_NEAR(r.noiseless_energy, r.ideal_energy, 0.25) << "d=" << r.point.step;
    }
}

TEST(Output, SidecarEmbedsResolvedConfig) {
    ExperimentConfig c;
    c.out = scratch("sidecar").string();
    run_command("spectrum", c);
    const auto side = json::parse(slurp(fs::path(c.out) / "spectrum.json.config.json"));
    EXPECT_EQ(side["command"], "spectrum");
    EXPECT_EQ(side["output"], "spectrum.json");
    EXPECT_EQ(side["config"]["n"], 4);
    EXPECT_EQ(side["config"]["trotter"]["substeps"], 8);
    EXPECT_NEAR(side["config"]["resolved_tau"].get<double>(), 1.1583, 1e-4);
}

TEST(Output, UnwritableDirectoryFailsEarly) {
    const auto base = scratch("unwritable");
    const auto blocker = base / "file";
    std::ofstream(blocker) << "x";
    EXPECT_THROW(prepare_output_dir((blocker / "sub").string()), ConfigError);
}

TEST(Cli, ExitCodes) {
    const auto out = scratch("cli_codes");
    EXPECT_EQ(run_cli("spectrum --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "spectrum.json"));
    EXPECT_EQ(run_cli("convergence --degrees 0..3 --out " + out.string()), 2); // no seed
    EXPECT_EQ(run_cli("spectrum --mode bogus --out " + out.string()), 2);
    EXPECT_EQ(run_cli("spectrum --bogus-flag"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);

    std::ofstream(out / "bad.json") << R"({"shot": 5})";
    EXPECT_EQ(run_cli("spectrum --config " + (out / "bad.json").string()), 2);

    std::ofstream(out / "bad.txt") << "1.0 ZQ\n";
    EXPECT_EQ(run_cli("spectrum --hamiltonian-file " + (out / "bad.txt").string() + " --out " +
                      out.string()),
              2);

    // E0 = 0 makes the resonant step undefined.
    std::ofstream(out / "zero.json") << R"({"n": 1, "h": 0.0})";
    EXPECT_EQ(run_cli("convergence --shots 0 --config " + (out / "zero.json").string() +
                      " --out " + out.string()),
              3);
}

TEST(Cli, HamiltonianFileOverride) {
    const auto out = scratch("cli_hfile");
    std::ofstream(out / "h.txt") << "# two-site\n1.0 ZZ\n0.5 XI\n";
    ASSERT_EQ(run_cli("spectrum --hamiltonian-file " + (out / "h.txt").string() + " --out " +
                      out.string()),
              0);
    const auto j = json::parse(slurp(out / "spectrum.json"));
    EXPECT_EQ(j["eigenvalues"].size(), 4u);
    EXPECT_NEAR(j["e0"].get<double>(), -std::sqrt(1.25), 1e-12);
}

TEST(Cli, RerunsAreByteIdentical) {
    const std::vector<std::string> commands = {
        "spectrum",
        "convergence --seed 11 --degrees 0..12 --shots 2000",
        "advantage --degrees 0..40",
        "noisy --seed 5 --degrees 0..6",
        "detune",
    };
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    std::ofstream(a / "small.json") << R"({"trajectories": 200})";
    for (const auto &cmd : commands) {
        const std::string extra = " --config " + (a / "small.json").string();
        ASSERT_EQ(run_cli(cmd + extra + " --out " + a.string()), 0) << cmd;
        ASSERT_EQ(run_cli(cmd + extra + " --out " + b.string()), 0) << cmd;
    }
    std::size_t compared = 0;
    for (const auto &entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        if (name == "small.json") {
            continue;
        }
        ASSERT_TRUE(fs::exists(b / name)) << name;
        std::string left = slurp(entry.path());
        std::string right = slurp(b / name);
        if (name.string().ends_with(".config.json")) {
            // The sidecar records the output directory, which differs by design.
            auto ja = json::parse(left);
            auto jb = json::parse(right);
            ja["config"].erase("out");
            jb["config"].erase("out");
            left = ja.dump();
            right = jb.dump();
        }
        EXPECT_EQ(left, right) << name;
        ++compared;
    }
    EXPECT_EQ(compared, 16u);
}
