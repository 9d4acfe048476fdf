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

#include <optional>
#include <string>
#include <vector>

#include "noma/clustering.hpp"
#include "noma/config.hpp"
#include "noma/matching.hpp"
#include "noma/power.hpp"

namespace noma::sim {

/// Result of allocating power on one slot state under some scheduler.
struct AllocationOutcome {
    bool feasible = false;
    power::PowerAllocation gamma;                 // time-averaged for OMA
    std::vector<std::vector<double>> member_rate; // aligned with state clusters
    int iterations = 0;
    bool converged = true;
    std::vector<double> surrogate_trace;          // adaptive scheduler only
};

/// Applies the configured scheduler to a slot state. For the adaptive scheme
/// this is the feasibility search plus the convexified power iteration; the
/// baselines fill powers by formula and report rates as achieved.
AllocationOutcome allocate_power(Scheduler scheduler, const power::SystemState& state,
                                 const ScenarioConfig& cfg);

// Baseline splits (active members of one cluster, decreasing-gain order).
std::vector<double> baseline_equal(int num_members, double budget);
std::vector<double> baseline_fixed(int num_members, double budget);
/// Pins every non-best member at the pinned rate through the cancellation
/// cascade and gives the remainder to the best; nullopt when the cascade
/// exceeds the budget.
std::optional<std::vector<double>> baseline_bcc(const rates::OrderedClusterState& cluster,
                                                double budget, double pinned_rate);
/// Equal time sharing: each member gets the whole cluster budget for a 1/n
/// fraction of the slot; returned rates are already scaled by the fraction.
std::vector<double> baseline_oma_rates(const rates::OrderedClusterState& cluster, double budget,
                                       const rates::QosSpec& qos);

struct UrllcOutcome {
    int arrival = 0;
    bool matched = false;
    bool dropped = false;
    int cluster = -1;
    int embb_user = -1;
    double rate = 0.0;
    bool latency_met = false;
};

/// Everything observable about one simulated mini slot, including the data
/// needed to re-audit it offline (ordered member descriptors and powers).
struct SlotMetrics {
    int slot = 0;
    bool feasible = true;
    std::vector<double> embb_rate;  // size K; punctured users carry 0
    double total_embb_rate = 0.0;
    double jain = 0.0;              // over surviving eMBB users
    std::vector<UrllcOutcome> urllc;
    int sca_iterations = 0;
    bool sca_converged = true;
    std::vector<double> surrogate_trace;
    std::vector<double> cluster_power;  // per-cluster coefficient sums

    // audit payload
    power::SystemState state;                    // post-puncture ordered state
    std::vector<std::vector<double>> gamma;      // aligned with state
    std::vector<std::string> events;             // drops, fallbacks
};

struct RunSummary {
    double total_embb_throughput = 0.0;  // summed over slots
    double mean_jain = 0.0;              // over feasible slots
    int infeasible_slots = 0;
    int dropped_urllc = 0;
    int served_urllc = 0;
    int latency_violations = 0;
    double clustering_sinr_min = 0.0;
};

struct RunResult {
    clustering::ClusteringResult clustering;
    std::vector<SlotMetrics> slots;
    RunSummary summary;
};

/// Clusters once on the reference slot, then simulates all Q mini slots:
/// sample channels, inject arrivals, match punctures, re-order, allocate,
/// and collect metrics. Throws std::runtime_error when clustering itself is
/// infeasible.
RunResult run_period(const ScenarioConfig& cfg);

/// Internal engine state exposed for tests: one slot end to end.
struct PeriodState;
SlotMetrics run_slot(PeriodState& ps, int slot);

struct PeriodState {
    ScenarioConfig cfg;
    clustering::ClusterAssignment assignment;
    std::vector<int> puncture_counts;  // per eMBB user, cumulative
};

/// Per-slot constraint audit (budgets, positivity, surviving minimum rates,
/// matched-URLLC latency, matching cardinality). Returns human-readable
/// violation strings; empty = clean. Rate checks apply only to the adaptive
/// scheduler, which is the one bound to the QoS contract.
std::vector<std::string> audit_slot(const SlotMetrics& m, const ScenarioConfig& cfg);

}  // namespace noma::sim
