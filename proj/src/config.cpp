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

#include "noma/config.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "noma/channel.hpp"

namespace noma::sim {

std::string to_string(Scheduler s) {
    switch (s) {
        case Scheduler::Adaptive: return "adaptive";
        case Scheduler::Equal: return "equal";
        case Scheduler::Fixed: return "fixed";
        case Scheduler::Bcc: return "bcc";
        case Scheduler::Oma: return "oma";
    }
    return "adaptive";
}

std::string to_string(FallbackPolicy p) {
    switch (p) {
        case FallbackPolicy::DropUrllc: return "drop";
        case FallbackPolicy::RelaxRmin: return "relax";
        case FallbackPolicy::Abort: return "abort";
    }
    return "drop";
}

Scheduler scheduler_from_string(const std::string& s) {
    if (s == "adaptive") return Scheduler::Adaptive;
    if (s == "equal") return Scheduler::Equal;
    if (s == "fixed") return Scheduler::Fixed;
    if (s == "bcc") return Scheduler::Bcc;
    if (s == "oma") return Scheduler::Oma;
    throw std::invalid_argument("scheduler: unknown value '" + s + "'");
}

FallbackPolicy fallback_from_string(const std::string& s) {
    if (s == "drop") return FallbackPolicy::DropUrllc;
    if (s == "relax") return FallbackPolicy::RelaxRmin;
    if (s == "abort") return FallbackPolicy::Abort;
    throw std::invalid_argument("fallback: unknown value '" + s + "'");
}

int ArrivalSpec::arrivals_at(int slot, std::uint64_t seed) const {
    if (!stochastic) {
        auto it = schedule.find(slot);
        return it == schedule.end() ? 0 : it->second;
    }
    channel::GaussianStream g(seed, static_cast<std::uint64_t>(slot),
                              channel::StreamKind::Arrival, 0);
    int count = 0;
    for (int i = 0; i < max_per_slot; ++i) {
        if (g.next_uniform() < probability) ++count;
    }
    return count;
}

double ScenarioConfig::rho_linear() const { return std::pow(10.0, rho_db / 10.0); }

void ScenarioConfig::resolve_defaults() {
    if (r_min_per_user.empty()) {
        r_min_per_user.assign(num_embb, qos.r_min);
    }
}

void ScenarioConfig::validate() const {
    if (num_embb < 1) throw std::invalid_argument("num_embb must be >= 1");
    if (num_clusters < 1) throw std::invalid_argument("num_clusters must be >= 1");
    if (num_rx_antennas < num_clusters) {
        throw std::invalid_argument("num_rx_antennas: N >= M required");
    }
    if (num_embb < min_cluster_size * num_clusters) {
        throw std::invalid_argument("num_embb: K >= min_cluster_size * M required");
    }
    if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
    if (reference_slot < 1 || reference_slot > num_slots) {
        throw std::invalid_argument("reference_slot must lie in [1, num_slots]");
    }
    if (!size_profile.empty()) {
        if (static_cast<int>(size_profile.size()) != num_clusters) {
            throw std::invalid_argument("size_profile length must equal num_clusters");
        }
        if (std::accumulate(size_profile.begin(), size_profile.end(), 0) != num_embb) {
            throw std::invalid_argument("size_profile must sum to num_embb");
        }
        for (int s : size_profile) {
            if (s < min_cluster_size) {
                throw std::invalid_argument("size_profile entries must be >= min_cluster_size");
            }
        }
    }
    qos.validate();
    if (!r_min_per_user.empty() &&
        static_cast<int>(r_min_per_user.size()) != num_embb) {
        throw std::invalid_argument("r_min_per_user length must equal num_embb");
    }
    for (const auto& [slot, count] : arrivals.schedule) {
        if (slot < 1 || slot > num_slots) {
            throw std::invalid_argument("arrivals.schedule slot outside [1, num_slots]");
        }
        if (count < 0 || count > num_embb) {
            throw std::invalid_argument("arrivals.schedule count outside [0, num_embb]");
        }
    }
    if (arrivals.stochastic) {
        if (arrivals.probability < 0.0 || arrivals.probability > 1.0) {
            throw std::invalid_argument("arrivals.probability outside [0, 1]");
        }
        if (arrivals.max_per_slot < 0 || arrivals.max_per_slot > num_embb) {
            throw std::invalid_argument("arrivals.max_per_slot outside [0, num_embb]");
        }
    }
    if (delta <= 0.0) throw std::invalid_argument("delta must be > 0");
    if (sca_tol <= 0.0) throw std::invalid_argument("sca_tol must be > 0");
    if (sca_max_iterations < 1) throw std::invalid_argument("sca_max_iterations must be >= 1");
    if (bcc_r_min < 0.0) throw std::invalid_argument("bcc_r_min must be >= 0");
}

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.arrivals.schedule = {{1, 1}, {2, 3}, {4, 4}, {6, 2}, {8, 1}};
    cfg.resolve_defaults();
    return cfg;
}

}  // namespace noma::sim
