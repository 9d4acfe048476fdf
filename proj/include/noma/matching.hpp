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

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace noma::matching {

/// An eMBB transmission slot that a URLLC arrival may puncture.
struct SlotRef {
    int cluster = 0;
    int embb_user = 0;
    bool operator==(const SlotRef&) const = default;
    auto operator<=>(const SlotRef&) const = default;
};

/// Solo-puncture value table: value[n][s] is the total eMBB throughput when
/// only arrival n punctures slot s and every other arrival is rejected.
/// Infeasible pairs carry no entry and are omitted from preference lists.
struct PunctureValueTable {
    std::vector<SlotRef> slots;
    int num_arrivals = 0;
    std::vector<std::map<int, double>> value;  // [arrival][slot index] -> rate

    bool feasible(int arrival, int slot_index) const {
        return value[arrival].count(slot_index) > 0;
    }
};

/// Ranked candidates per side. Entries are indices: arrivals hold slot
/// indices into `slots`, slots hold arrival ids.
struct PreferenceLists {
    std::vector<SlotRef> slots;
    std::vector<std::vector<int>> arrival_pref;  // [arrival] -> slot indices, best first
    std::vector<std::vector<int>> slot_pref;     // [slot index] -> arrival ids, best first
};

/// Builds both preference sides: slots rank arrivals by descending
/// solo-puncture value; arrivals rank slots by ascending historical puncture
/// count, then descending value. All residual ties break toward the lower id.
/// Throws std::invalid_argument when there are more arrivals than slots.
PreferenceLists build_preferences(const PunctureValueTable& table,
                                  const std::vector<int>& puncture_counts);

struct PunctureMatching {
    std::map<int, int> pair_of_arrival;  // arrival -> slot index; absent = unmatched
    std::vector<SlotRef> slots;

    std::optional<int> slot_of(int arrival) const;
    std::optional<int> arrival_at(int slot_index) const;
};

/// Arrival-proposing deferred acceptance over possibly incomplete lists.
/// Terminates after at most (arrivals x slots) proposals; arrivals with an
/// exhausted list stay unmatched.
PunctureMatching gale_shapley(const PreferenceLists& prefs);

/// True when no mutually acceptable pair would rather be matched with each
/// other than with their current partners (an unmatched side counts as
/// always willing).
bool is_stable(const PunctureMatching& matching, const PreferenceLists& prefs);

}  // namespace noma::matching
