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

#include "noma/matching.hpp"

#include <algorithm>
#include <stdexcept>

namespace noma::matching {

std::optional<int> PunctureMatching::slot_of(int arrival) const {
    auto it = pair_of_arrival.find(arrival);
    if (it == pair_of_arrival.end()) return std::nullopt;
    return it->second;
}

std::optional<int> PunctureMatching::arrival_at(int slot_index) const {
    for (const auto& [a, s] : pair_of_arrival) {
        if (s == slot_index) return a;
    }
    return std::nullopt;
}

PreferenceLists build_preferences(const PunctureValueTable& table,
                                  const std::vector<int>& puncture_counts) {
    const int num_slots = static_cast<int>(table.slots.size());
    if (table.num_arrivals > num_slots) {
        throw std::invalid_argument("build_preferences: more arrivals than eMBB slots");
    }
    if (static_cast<int>(puncture_counts.size()) != num_slots) {
        throw std::invalid_argument("build_preferences: puncture counts not aligned with slots");
    }

    PreferenceLists pl;
    pl.slots = table.slots;
    pl.arrival_pref.resize(table.num_arrivals);
    pl.slot_pref.resize(num_slots);

    for (int a = 0; a < table.num_arrivals; ++a) {
        std::vector<int>& pref = pl.arrival_pref[a];
        for (const auto& [s, v] : table.value[a]) pref.push_back(s);
        // Fewest historical punctures first, then the larger solo-puncture
        // value, then the lower slot index.
        std::sort(pref.begin(), pref.end(), [&](int s1, int s2) {
            if (puncture_counts[s1] != puncture_counts[s2]) {
                return puncture_counts[s1] < puncture_counts[s2];
            }
            const double v1 = table.value[a].at(s1);
            const double v2 = table.value[a].at(s2);
            if (v1 != v2) return v1 > v2;
            return s1 < s2;
        });
    }
    for (int s = 0; s < num_slots; ++s) {
        std::vector<int>& pref = pl.slot_pref[s];
        for (int a = 0; a < table.num_arrivals; ++a) {
            if (table.feasible(a, s)) pref.push_back(a);
        }
        std::sort(pref.begin(), pref.end(), [&](int a1, int a2) {
            const double v1 = table.value[a1].at(s);
            const double v2 = table.value[a2].at(s);
            if (v1 != v2) return v1 > v2;
            return a1 < a2;
        });
    }
    return pl;
}

namespace {

// Rank of a candidate inside a preference list; missing = unacceptable.
int rank_of(const std::vector<int>& pref, int candidate) {
    for (int i = 0; i < static_cast<int>(pref.size()); ++i) {
        if (pref[i] == candidate) return i;
    }
    return -1;
}

}  // namespace

PunctureMatching gale_shapley(const PreferenceLists& prefs) {
    const int num_arrivals = static_cast<int>(prefs.arrival_pref.size());
    const int num_slots = static_cast<int>(prefs.slots.size());

    PunctureMatching m;
    m.slots = prefs.slots;
    std::vector<int> next_proposal(num_arrivals, 0);
    std::vector<int> holder(num_slots, -1);

    std::vector<int> open;  // arrivals still proposing, LIFO with lowest id preferred
    for (int a = num_arrivals - 1; a >= 0; --a) open.push_back(a);

    while (!open.empty()) {
        const int a = open.back();
        if (next_proposal[a] >= static_cast<int>(prefs.arrival_pref[a].size())) {
            open.pop_back();  // exhausted list, stays unmatched
            continue;
        }
        const int s = prefs.arrival_pref[a][next_proposal[a]++];
        const int incumbent = holder[s];
        const int rank_new = rank_of(prefs.slot_pref[s], a);
        if (rank_new < 0) continue;  // slot does not accept this arrival
        if (incumbent < 0) {
            holder[s] = a;
            open.pop_back();
        } else {
            const int rank_old = rank_of(prefs.slot_pref[s], incumbent);
            if (rank_new < rank_old) {
                holder[s] = a;
                open.pop_back();
                open.push_back(incumbent);
            }
        }
    }

    for (int s = 0; s < num_slots; ++s) {
        if (holder[s] >= 0) m.pair_of_arrival[holder[s]] = s;
    }
    return m;
}

bool is_stable(const PunctureMatching& matching, const PreferenceLists& prefs) {
    const int num_arrivals = static_cast<int>(prefs.arrival_pref.size());
    const int num_slots = static_cast<int>(prefs.slots.size());
    std::vector<int> holder(num_slots, -1);
    for (const auto& [a, s] : matching.pair_of_arrival) holder[s] = a;

    for (int a = 0; a < num_arrivals; ++a) {
        const auto current = matching.slot_of(a);
        const int current_rank =
            current ? rank_of(prefs.arrival_pref[a], *current) : -1;
        for (int s : prefs.arrival_pref[a]) {
            const int cand_rank = rank_of(prefs.arrival_pref[a], s);
            const bool arrival_wants = !current || cand_rank < current_rank;
            if (!arrival_wants) continue;
            const int occupant = holder[s];
            const int my_rank = rank_of(prefs.slot_pref[s], a);
            if (my_rank < 0) continue;  // not mutually acceptable
            const bool slot_wants =
                occupant < 0 || my_rank < rank_of(prefs.slot_pref[s], occupant);
            if (slot_wants) return false;  // blocking pair
        }
    }
    return true;
}

}  // namespace noma::matching
