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
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcfilter/filter.hpp"

namespace pcf {

/// Round-trippable float text: 17 significant digits, '.' separator.
inline std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Minimal CSV row builder.
class CsvRow {
  public:
    CsvRow &operator<<(const std::string &s) {
        sep();
        line_ += s;
        return *this;
    }
    CsvRow &operator<<(const char *s) { return *this << std::string(s); }
    CsvRow &operator<<(double x) { return *this << format_double(x); }
    CsvRow &operator<<(std::size_t x) { return *this << std::to_string(x); }

    [[nodiscard]] const std::string &str() const { return line_; }

  private:
    void sep() {
        if (!first_) {
            line_ += ',';
        }
        first_ = false;
    }
    std::string line_;
    bool first_ = true;
};

inline std::ostream &operator<<(std::ostream &os, const CsvRow &row) {
    return os << row.str() << '\n';
}

/// protocol,step,energy,fidelity,cumulative_success_prob[,sampled_energy,sampled_stderr]
inline void write_trace_csv(std::ostream &os, const FilterTrace &trace) {
    const bool sampled = trace.config.shots > 0;
    CsvRow header;
    header << "protocol" << "step" << "energy" << "fidelity" << "cumulative_success_prob";
    if (sampled) {
        header << "sampled_energy" << "sampled_stderr";
    }
    os << header;
    for (const auto &r : trace.records) {
        CsvRow row;
        row << trace.protocol << r.step << r.energy << r.fidelity
            << r.cumulative_success_probability;
        if (sampled) {
            row << r.sampled_energy << r.sampled_stderr;
        }
        os << row;
    }
}

inline nlohmann::json to_json(const TrotterConfig &t) {
    return {{"order", t.order}, {"substeps", t.substeps}};
}

inline nlohmann::json to_json(const FilterConfig &c) {
    return {{"tau", c.tau},
            {"degree", c.degree},
            {"mode", std::string(to_string(c.mode))},
            {"trotter", to_json(c.trotter)},
            {"seed", c.seed},
            {"mcmr_propagator", c.mcmr_propagator == PropagatorKind::exact ? "exact" : "trotter"},
            {"shots", c.shots}};
}

inline nlohmann::json to_json(const FilterTrace &trace) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto &r : trace.records) {
        nlohmann::json j = {{"step", r.step},
                            {"energy", r.energy},
                            {"fidelity", r.fidelity},
                            {"cumulative_success_prob", r.cumulative_success_probability}};
        if (trace.config.shots > 0) {
            j["sampled_energy"] = r.sampled_energy;
            j["sampled_stderr"] = r.sampled_stderr;
        }
        records.push_back(std::move(j));
    }
    return {{"protocol", trace.protocol},
            {"config", to_json(trace.config)},
            {"records", std::move(records)},
            {"aborted", trace.aborted},
            {"abort_step", trace.abort_step},
            {"final_state_norm", std::sqrt(trace.final_state.squared_norm())},
            {"warnings", trace.warnings}};
}

} // namespace pcf
