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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "noma/rates.hpp"

namespace noma::sim {

enum class Scheduler { Adaptive, Equal, Fixed, Bcc, Oma };
enum class FallbackPolicy { DropUrllc, RelaxRmin, Abort };

std::string to_string(Scheduler s);
std::string to_string(FallbackPolicy p);
Scheduler scheduler_from_string(const std::string& s);
FallbackPolicy fallback_from_string(const std::string& s);

/// URLLC arrival pattern: an explicit slot -> count schedule, or Bernoulli
/// arrivals capped per slot.
struct ArrivalSpec {
    std::map<int, int> schedule;  // 1-based slot -> arrival count
    bool stochastic = false;
    double probability = 0.0;
    int max_per_slot = 1;

    int arrivals_at(int slot, std::uint64_t seed) const;
};

struct ScenarioConfig {
    int num_embb = 9;       // K
    int num_clusters = 3;   // M, equals base-station antennas
    int num_rx_antennas = 3;// N, per-user antennas
    int num_slots = 8;      // Q mini slots per transmission period

    std::vector<int> size_profile = {4, 3, 2};  // empty: any sizes >= min_cluster_size
    int min_cluster_size = 2;

    double rho_db = 30.0;
    rates::QosSpec qos;
    std::vector<double> r_min_per_user;  // resolved to num_embb entries

    ArrivalSpec arrivals;  // default: the 1,3,4,2,1 burst on slots 1,2,4,6,8
    Scheduler scheduler = Scheduler::Adaptive;
    FallbackPolicy fallback = FallbackPolicy::DropUrllc;

    std::uint64_t seed = 1;
    int reference_slot = 1;       // clustering uses this slot's channels
    double delta = 1e-6;          // bisection tolerance
    double sca_tol = 1e-6;        // power-iteration stopping tolerance
    int sca_max_iterations = 200;
    bool pairwise_clustering = true;  // min over all decode pairs vs own-SINR only
    bool proxy_preference = false;    // rank punctures by SINR displacement, not full solves
    double bcc_r_min = 0.2;           // pinned rate for the best-channel baseline

    double rho_linear() const;
    void resolve_defaults();      // fills r_min_per_user etc.
    void validate() const;        // throws std::invalid_argument with field names
};

ScenarioConfig default_scenario();

}  // namespace noma::sim
