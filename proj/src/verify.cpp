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

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "noma/experiment.hpp"

namespace noma::experiment {

using nlohmann::json;

namespace {

/// Rebuilds a SlotMetrics audit payload from one trace file.
sim::SlotMetrics slot_from_json(const json& j) {
    sim::SlotMetrics m;
    m.slot = j.at("slot").get<int>();
    m.feasible = j.at("feasible").get<bool>();
    m.sca_iterations = j.at("sca_iterations").get<int>();
    m.sca_converged = j.at("sca_converged").get<bool>();
    m.surrogate_trace = j.at("surrogate").get<std::vector<double>>();
    m.embb_rate = j.at("embb_rate").get<std::vector<double>>();
    m.total_embb_rate = j.at("total_embb_rate").is_null()
                            ? std::nan("")
                            : j.at("total_embb_rate").get<double>();
    for (const auto& ju : j.at("urllc")) {
        sim::UrllcOutcome u;
        u.arrival = ju.at("arrival").get<int>();
        u.matched = ju.at("matched").get<bool>();
        u.dropped = ju.at("dropped").get<bool>();
        u.cluster = ju.at("cluster").get<int>();
        u.embb_user = ju.at("embb_user").get<int>();
        u.rate = ju.at("rate").get<double>();
        u.latency_met = ju.at("latency_met").get<bool>();
        m.urllc.push_back(u);
    }
    for (const auto& jc : j.at("clusters")) {
        std::vector<rates::Member> members;
        for (const auto& jm : jc.at("members")) {
            rates::Member mem;
            mem.user_id = jm.at("user_id").get<int>();
            mem.kind = jm.at("kind").get<std::string>() == "embb" ? rates::UserKind::Embb
                                                                  : rates::UserKind::Urllc;
            mem.gain = jm.at("gain").get<double>();
            mem.noise = jm.at("noise").get<double>();
            mem.rate_req = jm.at("rate_req").get<double>();
            members.push_back(mem);
        }
        m.state.clusters.push_back(
            rates::make_ordered(jc.at("cluster_id").get<int>(), std::move(members),
                                jc.at("rho").get<double>()));
        m.state.budgets.push_back(jc.at("budget").get<double>());
        m.gamma.push_back(jc.at("gamma").get<std::vector<double>>());
    }
    return m;
}

}  // namespace

std::vector<std::string> verify_run(const std::filesystem::path& results_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> violations;
    if (!fs::exists(results_dir)) {
        violations.push_back("results directory not found: " + results_dir.string());
        return violations;
    }

    std::vector<ResultRow> rows;
    const fs::path rows_path = results_dir / "rows.csv";
    if (fs::exists(rows_path)) {
        std::ifstream in(rows_path);
        std::stringstream buf;
        buf << in.rdbuf();
        rows = csv_decode(buf.str());
    } else {
        violations.push_back("missing rows.csv");
    }

    std::vector<fs::path> point_dirs;
    for (const auto& e : fs::directory_iterator(results_dir)) {
        if (e.is_directory() && e.path().filename().string().starts_with("point_")) {
            point_dirs.push_back(e.path());
        }
    }
    std::sort(point_dirs.begin(), point_dirs.end());
    if (point_dirs.empty()) violations.push_back("no sweep points found");

    for (const auto& point_dir : point_dirs) {
        json summary;
        {
            std::ifstream in(point_dir / "summary.json");
            if (!in) {
                violations.push_back("missing summary.json in " + point_dir.string());
                continue;
            }
            in >> summary;
        }
        std::vector<std::pair<std::string, std::string>> sweep_values;
        for (const auto& [k, v] : summary.at("sweep").items()) {
            sweep_values.emplace_back(k, v.get<std::string>());
        }

        for (const auto& e : fs::directory_iterator(point_dir)) {
            if (!e.is_directory() ||
                !e.path().filename().string().starts_with("run_")) {
                continue;
            }
            const fs::path run_dir = e.path();
            const std::string run_name = point_dir.filename().string() + "/" +
                                         run_dir.filename().string();
            if (!fs::exists(run_dir / "config.ini")) {
                violations.push_back(run_name + ": missing config.ini");
                continue;
            }
            ExperimentSpec snap;
            try {
                snap = parse_config(run_dir / "config.ini");
            } catch (const std::exception& ex) {
                violations.push_back(run_name + ": bad config snapshot: " + ex.what());
                continue;
            }
            const sim::ScenarioConfig& cfg = snap.base;
            if (fs::exists(run_dir / "error.txt")) continue;  // aborted run, kept as-is

            for (int slot = 1; slot <= cfg.num_slots; ++slot) {
                const fs::path trace =
                    run_dir / "trace" / ("slot_" + std::to_string(slot) + ".json");
                if (!fs::exists(trace)) {
                    violations.push_back(run_name + ": missing trace file slot_" +
                                         std::to_string(slot) + ".json");
                    continue;
                }
                json j;
                std::ifstream(trace) >> j;
                sim::SlotMetrics m;
                try {
                    m = slot_from_json(j);
                } catch (const std::exception& ex) {
                    violations.push_back(run_name + ": unreadable trace slot " +
                                         std::to_string(slot) + ": " + ex.what());
                    continue;
                }
                for (const auto& v : sim::audit_slot(m, cfg)) {
                    violations.push_back(run_name + " slot " + std::to_string(slot) + ": " + v);
                }
                for (size_t i = 1; i < m.surrogate_trace.size(); ++i) {
                    if (m.surrogate_trace[i] > m.surrogate_trace[i - 1] + 1e-9) {
                        violations.push_back(run_name + " slot " + std::to_string(slot) +
                                             ": surrogate sequence increased");
                    }
                }
                if (m.feasible) {
                    // Recompute the stored total from the stored state/powers.
                    double total = 0.0;
                    for (size_t c = 0; c < m.state.clusters.size(); ++c) {
                        const auto& cl = m.state.clusters[c];
                        for (size_t k = 0; k < cl.members.size(); ++k) {
                            if (cl.members[k].kind != rates::UserKind::Embb) continue;
                            const double sinr =
                                rates::effective_sinr(cl, m.gamma[c], static_cast<int>(k));
                            total += rates::shannon_rate(sinr);
                        }
                    }
                    if (std::abs(total - m.total_embb_rate) > 1e-9 * (1.0 + std::abs(total))) {
                        violations.push_back(run_name + " slot " + std::to_string(slot) +
                                             ": stored total eMBB rate mismatch");
                    }
                    // Cross-check against rows.csv.
                    bool found = false;
                    for (const auto& r : rows) {
                        if (r.seed != cfg.seed || r.slot != slot ||
                            r.metric != "total_embb_rate") {
                            continue;
                        }
                        bool same_point = true;
                        for (const auto& [k, v] : sweep_values) {
                            for (const auto& [rk, rv] : r.sweep_values) {
                                if (rk == k && rv != v) same_point = false;
                            }
                        }
                        if (!same_point) continue;
                        found = true;
                        if (std::abs(r.value - m.total_embb_rate) >
                            1e-9 * (1.0 + std::abs(r.value))) {
                            violations.push_back(run_name + " slot " + std::to_string(slot) +
                                                 ": rows.csv total disagrees with trace");
                        }
                    }
                    if (!found) {
                        violations.push_back(run_name + " slot " + std::to_string(slot) +
                                             ": no matching rows.csv entry");
                    }
                }
            }
        }
    }
    return violations;
}

}  // namespace noma::experiment
