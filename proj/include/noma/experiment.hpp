// noma-coexist: URLLC/eMBB coexistence scheduling for downlink MIMO-NOMA
// Copyright (C) 2026 the noma-coexist authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "noma/config.hpp"
#include "noma/sim.hpp"

namespace noma::experiment {

/// One sweep axis: a config field name plus the values it takes.
struct SweepAxis {
    std::string field;
    std::vector<std::string> values;
};

struct ExperimentSpec {
    sim::ScenarioConfig base;
    std::vector<SweepAxis> axes;  // empty for a single run
    int replications = 1;         // seeds base.seed .. base.seed + replications - 1
    std::filesystem::path out_dir = "out";
    int workers = 0;              // 0: hardware concurrency
};

/// Parses the key = value configuration grammar (see README). An empty file
/// yields the default desk-scale scenario. Unknown keys and invariant
/// violations throw std::invalid_argument naming the offending field.
ExperimentSpec parse_config(const std::filesystem::path& path);
ExperimentSpec parse_config_text(const std::string& text);

/// Applies one axis value to a config; throws on unknown field names.
void apply_override(sim::ScenarioConfig& cfg, const std::string& field, const std::string& value);

struct ResultRow {
    std::vector<std::pair<std::string, std::string>> sweep_values;
    std::uint64_t seed = 0;
    int slot = 0;  // 0 row carries period-level metrics
    std::string metric;
    double value = 0.0;
};

std::string csv_encode(const std::vector<ResultRow>& rows,
                       const std::vector<std::string>& axis_names);
std::vector<ResultRow> csv_decode(const std::string& text);

/// Runs the experiment: every sweep point x replication, writing rows.csv,
/// per-point summary.json and per-run trace files under out_dir. Returns the
/// process exit code (nonzero when any run aborted; partial results are
/// kept).
int run_experiment(const ExperimentSpec& spec);

/// Re-audits a results directory produced by run_experiment: budgets, QoS,
/// matching cardinality and surrogate monotonicity are recomputed from the
/// stored traces, and rows.csv is cross-checked. Returns violation strings.
std::vector<std::string> verify_run(const std::filesystem::path& results_dir);

/// Condensed invariant suite for the `selftest` verb; prints one line per
/// check and returns the number of failures.
int selftest(std::ostream& os);

}  // namespace noma::experiment
