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

#include "noma/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace noma::experiment {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("field '" + field + "': not a number: '" + v + "'");
    }
}

long parse_int(const std::string& field, const std::string& v) {
    try {
        size_t pos = 0;
        const long i = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw std::invalid_argument("field '" + field + "': not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("field '" + field + "': not a boolean: '" + v + "'");
}

std::map<int, int> parse_schedule(const std::string& field, const std::string& v) {
    std::map<int, int> out;
    if (v == "none" || v.empty()) return out;
    for (const auto& item : split(v, ',')) {
        const auto kv = split(item, ':');
        if (kv.size() != 2) {
            throw std::invalid_argument("field '" + field + "': expected slot:count pairs");
        }
        out[static_cast<int>(parse_int(field, kv[0]))] =
            static_cast<int>(parse_int(field, kv[1]));
    }
    return out;
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void apply_override(sim::ScenarioConfig& cfg, const std::string& field,
                    const std::string& value) {
    if (field == "k" || field == "num_embb") {
        cfg.num_embb = static_cast<int>(parse_int(field, value));
        cfg.r_min_per_user.clear();
    } else if (field == "m" || field == "num_clusters") {
        cfg.num_clusters = static_cast<int>(parse_int(field, value));
    } else if (field == "n" || field == "num_rx_antennas") {
        cfg.num_rx_antennas = static_cast<int>(parse_int(field, value));
    } else if (field == "q" || field == "num_slots") {
        cfg.num_slots = static_cast<int>(parse_int(field, value));
    } else if (field == "size_profile") {
        cfg.size_profile.clear();
        if (value != "none" && !value.empty()) {
            for (const auto& s : split(value, ',')) {
                cfg.size_profile.push_back(static_cast<int>(parse_int(field, s)));
            }
        }
    } else if (field == "min_cluster_size") {
        cfg.min_cluster_size = static_cast<int>(parse_int(field, value));
    } else if (field == "rho_db") {
        cfg.rho_db = parse_double(field, value);
    } else if (field == "scheduler") {
        cfg.scheduler = sim::scheduler_from_string(value);
    } else if (field == "fallback") {
        cfg.fallback = sim::fallback_from_string(value);
    } else if (field == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(field, value));
    } else if (field == "reference_slot") {
        cfg.reference_slot = static_cast<int>(parse_int(field, value));
    } else if (field == "delta") {
        cfg.delta = parse_double(field, value);
    } else if (field == "sca_tol") {
        cfg.sca_tol = parse_double(field, value);
    } else if (field == "sca_max_iterations") {
        cfg.sca_max_iterations = static_cast<int>(parse_int(field, value));
    } else if (field == "pairwise_clustering") {
        cfg.pairwise_clustering = parse_bool(field, value);
    } else if (field == "proxy_preference") {
        cfg.proxy_preference = parse_bool(field, value);
    } else if (field == "bcc_r_min") {
        cfg.bcc_r_min = parse_double(field, value);
    } else if (field == "r_min") {
        cfg.qos.r_min = parse_double(field, value);
        cfg.r_min_per_user.clear();
    } else if (field == "d_max_ms") {
        cfg.qos.d_max_s = parse_double(field, value) * 1e-3;
    } else if (field == "packet_bits") {
        cfg.qos.packet_bits = parse_double(field, value);
    } else if (field == "packet_bytes") {
        cfg.qos.packet_bits = parse_double(field, value) * 8.0;
    } else if (field == "bandwidth_hz") {
        cfg.qos.bandwidth_hz = parse_double(field, value);
    } else if (field == "blocklength") {
        cfg.qos.blocklength = static_cast<int>(parse_int(field, value));
    } else if (field == "reliability_eps") {
        cfg.qos.reliability_eps = parse_double(field, value);
    } else if (field == "schedule") {
        cfg.arrivals.schedule = parse_schedule(field, value);
        cfg.arrivals.stochastic = false;
    } else if (field == "arrival_count") {
        // One arrival in each of the first n mini slots.
        const int n = static_cast<int>(parse_int(field, value));
        cfg.arrivals.schedule.clear();
        cfg.arrivals.stochastic = false;
        for (int i = 1; i <= n; ++i) cfg.arrivals.schedule[i] = 1;
    } else if (field == "stochastic") {
        cfg.arrivals.stochastic = parse_bool(field, value);
    } else if (field == "probability") {
        cfg.arrivals.probability = parse_double(field, value);
    } else if (field == "max_per_slot") {
        cfg.arrivals.max_per_slot = static_cast<int>(parse_int(field, value));
    } else {
        throw std::invalid_argument("unknown field '" + field + "'");
    }
}

ExperimentSpec parse_config_text(const std::string& text) {
    ExperimentSpec spec;
    spec.base = sim::default_scenario();
    std::string section = "scenario";
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "qos" && section != "arrivals" &&
                section != "experiment" && section != "sweep") {
                throw std::invalid_argument("unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section == "sweep") {
            SweepAxis axis;
            axis.field = key;
            axis.values = split(value, ',');
            if (axis.values.empty()) {
                throw std::invalid_argument("sweep axis '" + key + "' has no values");
            }
            // Fail fast on axes over unknown fields.
            sim::ScenarioConfig probe = spec.base;
            apply_override(probe, key, axis.values.front());
            spec.axes.push_back(std::move(axis));
        } else if (section == "experiment") {
            if (key == "replications") {
                spec.replications = static_cast<int>(parse_int(key, value));
                if (spec.replications < 1) {
                    throw std::invalid_argument("replications must be >= 1");
                }
            } else if (key == "out_dir") {
                spec.out_dir = value;
            } else if (key == "workers") {
                spec.workers = static_cast<int>(parse_int(key, value));
            } else {
                throw std::invalid_argument("unknown field 'experiment." + key + "'");
            }
        } else if (section == "qos" || section == "arrivals" || section == "scenario") {
            apply_override(spec.base, key, value);
        }
    }
    spec.base.resolve_defaults();
    spec.base.validate();
    return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string csv_encode(const std::vector<ResultRow>& rows,
                       const std::vector<std::string>& axis_names) {
    std::string out;
    for (const auto& a : axis_names) out += a + ",";
    out += "seed,slot,metric,value\n";
    for (const auto& r : rows) {
        for (const auto& a : axis_names) {
            std::string v;
            for (const auto& [name, val] : r.sweep_values) {
                if (name == a) v = val;
            }
            out += v + ",";
        }
        out += std::to_string(r.seed) + "," + std::to_string(r.slot) + "," + r.metric + "," +
               fmt_double(r.value) + "\n";
    }
    return out;
}

std::vector<ResultRow> csv_decode(const std::string& text) {
    std::vector<ResultRow> rows;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) return rows;
    const auto header = split(line, ',');
    if (header.size() < 4) throw std::invalid_argument("csv: malformed header");
    const int n_axes = static_cast<int>(header.size()) - 4;
    while (std::getline(ss, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) throw std::invalid_argument("csv: ragged row");
        ResultRow r;
        for (int i = 0; i < n_axes; ++i) r.sweep_values.emplace_back(header[i], cells[i]);
        r.seed = static_cast<std::uint64_t>(parse_int("seed", cells[n_axes]));
        r.slot = static_cast<int>(parse_int("slot", cells[n_axes + 1]));
        r.metric = cells[n_axes + 2];
        const std::string& v = cells[n_axes + 3];
        r.value = v == "NaN" ? std::nan("") : parse_double("value", v);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

std::string serialize_config(const sim::ScenarioConfig& cfg) {
    std::string s;
    s += "[scenario]\n";
    s += "k = " + std::to_string(cfg.num_embb) + "\n";
    s += "m = " + std::to_string(cfg.num_clusters) + "\n";
    s += "n = " + std::to_string(cfg.num_rx_antennas) + "\n";
    s += "q = " + std::to_string(cfg.num_slots) + "\n";
    if (!cfg.size_profile.empty()) {
        s += "size_profile = ";
        for (size_t i = 0; i < cfg.size_profile.size(); ++i) {
            s += (i ? "," : "") + std::to_string(cfg.size_profile[i]);
        }
        s += "\n";
    } else {
        s += "size_profile = none\n";
    }
    s += "min_cluster_size = " + std::to_string(cfg.min_cluster_size) + "\n";
    s += "rho_db = " + fmt_double(cfg.rho_db) + "\n";
    s += "scheduler = " + sim::to_string(cfg.scheduler) + "\n";
    s += "fallback = " + sim::to_string(cfg.fallback) + "\n";
    s += "seed = " + std::to_string(cfg.seed) + "\n";
    s += "reference_slot = " + std::to_string(cfg.reference_slot) + "\n";
    s += "delta = " + fmt_double(cfg.delta) + "\n";
    s += "sca_tol = " + fmt_double(cfg.sca_tol) + "\n";
    s += "sca_max_iterations = " + std::to_string(cfg.sca_max_iterations) + "\n";
    s += "pairwise_clustering = " + std::string(cfg.pairwise_clustering ? "true" : "false") +
         "\n";
    s += "proxy_preference = " + std::string(cfg.proxy_preference ? "true" : "false") + "\n";
    s += "bcc_r_min = " + fmt_double(cfg.bcc_r_min) + "\n";
    s += "[qos]\n";
    s += "r_min = " + fmt_double(cfg.qos.r_min) + "\n";
    s += "d_max_ms = " + fmt_double(cfg.qos.d_max_s * 1e3) + "\n";
    s += "packet_bits = " + fmt_double(cfg.qos.packet_bits) + "\n";
    s += "bandwidth_hz = " + fmt_double(cfg.qos.bandwidth_hz) + "\n";
    s += "blocklength = " + std::to_string(cfg.qos.blocklength) + "\n";
    s += "reliability_eps = " + fmt_double(cfg.qos.reliability_eps) + "\n";
    s += "[arrivals]\n";
    if (cfg.arrivals.stochastic) {
        s += "stochastic = true\n";
        s += "probability = " + fmt_double(cfg.arrivals.probability) + "\n";
        s += "max_per_slot = " + std::to_string(cfg.arrivals.max_per_slot) + "\n";
    } else {
        s += "schedule = ";
        if (cfg.arrivals.schedule.empty()) {
            s += "none";
        } else {
            bool first = true;
            for (const auto& [slot, count] : cfg.arrivals.schedule) {
                if (!first) s += ",";
                s += std::to_string(slot) + ":" + std::to_string(count);
                first = false;
            }
        }
        s += "\n";
    }
    return s;
}

json slot_to_json(const sim::SlotMetrics& m) {
    json j;
    j["slot"] = m.slot;
    j["feasible"] = m.feasible;
    j["events"] = m.events;
    j["sca_iterations"] = m.sca_iterations;
    j["sca_converged"] = m.sca_converged;
    j["surrogate"] = m.surrogate_trace;
    j["embb_rate"] = m.embb_rate;
    j["total_embb_rate"] = m.total_embb_rate;
    j["jain"] = m.jain;
    j["urllc"] = json::array();
    for (const auto& u : m.urllc) {
        j["urllc"].push_back({{"arrival", u.arrival},
                              {"matched", u.matched},
                              {"dropped", u.dropped},
                              {"cluster", u.cluster},
                              {"embb_user", u.embb_user},
                              {"rate", u.rate},
                              {"latency_met", u.latency_met}});
    }
    j["clusters"] = json::array();
    for (size_t c = 0; c < m.state.clusters.size(); ++c) {
        const auto& cl = m.state.clusters[c];
        json jc;
        jc["cluster_id"] = cl.cluster_id;
        jc["rho"] = cl.rho;
        jc["budget"] = m.state.budgets[c];
        jc["members"] = json::array();
        for (const auto& mem : cl.members) {
            jc["members"].push_back({{"user_id", mem.user_id},
                                     {"kind", mem.kind == rates::UserKind::Embb ? "embb"
                                                                                : "urllc"},
                                     {"gain", mem.gain},
                                     {"noise", mem.noise},
                                     {"rate_req", mem.rate_req}});
        }
        jc["gamma"] = m.feasible ? m.gamma[c] : std::vector<double>{};
        j["clusters"].push_back(std::move(jc));
    }
    return j;
}

void append_run_rows(std::vector<ResultRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& sweep_values,
                     std::uint64_t seed, const sim::RunResult& run) {
    auto push = [&](int slot, const std::string& metric, double value) {
        rows.push_back(ResultRow{sweep_values, seed, slot, metric, value});
    };
    for (const auto& m : run.slots) {
        push(m.slot, "feasible", m.feasible ? 1.0 : 0.0);
        push(m.slot, "total_embb_rate", m.total_embb_rate);
        push(m.slot, "jain", m.jain);
        push(m.slot, "sca_iterations", m.sca_iterations);
        for (size_t u = 0; u < m.embb_rate.size(); ++u) {
            push(m.slot, "embb_rate[" + std::to_string(u) + "]", m.embb_rate[u]);
        }
        for (const auto& u : m.urllc) {
            push(m.slot, "urllc_rate[" + std::to_string(u.arrival) + "]", u.rate);
            push(m.slot, "urllc_latency_ok[" + std::to_string(u.arrival) + "]",
                 u.latency_met ? 1.0 : 0.0);
            push(m.slot, "urllc_matched[" + std::to_string(u.arrival) + "]",
                 u.matched ? 1.0 : 0.0);
        }
    }
    push(0, "period_total_embb_throughput", run.summary.total_embb_throughput);
    push(0, "mean_jain", run.summary.mean_jain);
    push(0, "infeasible_slots", run.summary.infeasible_slots);
    push(0, "served_urllc", run.summary.served_urllc);
    push(0, "dropped_urllc", run.summary.dropped_urllc);
    push(0, "latency_violations", run.summary.latency_violations);
    push(0, "clustering_sinr_min", run.summary.clustering_sinr_min);
}

struct SweepPoint {
    std::vector<std::pair<std::string, std::string>> values;  // field -> value
};

std::vector<SweepPoint> expand_axes(const std::vector<SweepAxis>& axes) {
    std::vector<SweepPoint> points{{}};
    for (const auto& axis : axes) {
        std::vector<SweepPoint> next;
        for (const auto& p : points) {
            for (const auto& v : axis.values) {
                SweepPoint q = p;
                q.values.emplace_back(axis.field, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    const auto points = expand_axes(spec.axes);

    struct Task {
        int point = 0;
        int rep = 0;
    };
    std::vector<Task> tasks;
    for (int p = 0; p < static_cast<int>(points.size()); ++p) {
        for (int r = 0; r < spec.replications; ++r) tasks.push_back(Task{p, r});
    }

    struct TaskResult {
        bool ok = false;
        std::string error;
        std::uint64_t seed = 0;
        sim::RunResult run;
        sim::ScenarioConfig cfg;
    };
    std::vector<TaskResult> results(tasks.size());

    auto run_task = [&](size_t i) {
        const Task& t = tasks[i];
        TaskResult& out = results[i];
        sim::ScenarioConfig cfg = spec.base;
        try {
            for (const auto& [field, value] : points[t.point].values) {
                apply_override(cfg, field, value);
            }
            cfg.seed = spec.base.seed + static_cast<std::uint64_t>(t.rep);
            cfg.resolve_defaults();
            cfg.validate();
            out.seed = cfg.seed;
            out.cfg = cfg;
            out.run = sim::run_period(cfg);
            out.ok = true;
        } catch (const std::exception& e) {
            out.seed = cfg.seed;
            out.cfg = cfg;
            out.error = e.what();
        }
    };

    int workers = spec.workers > 0 ? spec.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_task(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Deterministic output order regardless of worker interleaving.
    std::vector<std::string> axis_names;
    for (const auto& a : spec.axes) axis_names.push_back(a.field);
    std::vector<ResultRow> rows;
    int failures = 0;
    for (int p = 0; p < static_cast<int>(points.size()); ++p) {
        const fs::path point_dir =
            spec.out_dir / ("point_" + std::to_string(p));
        fs::create_directories(point_dir);
        json summary;
        summary["sweep"] = json::object();
        for (const auto& [f, v] : points[p].values) summary["sweep"][f] = v;
        summary["replications"] = spec.replications;
        std::vector<double> totals;
        std::vector<double> jains;
        int infeasible = 0, served = 0, dropped = 0, latency_bad = 0;

        for (size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].point != p) continue;
            const TaskResult& r = results[i];
            const fs::path run_dir = point_dir / ("run_" + std::to_string(r.seed));
            fs::create_directories(run_dir / "trace");
            std::ofstream(run_dir / "config.ini") << serialize_config(r.cfg);
            if (!r.ok) {
                ++failures;
                std::ofstream(run_dir / "error.txt") << r.error << "\n";
                continue;
            }
            for (const auto& m : r.run.slots) {
                std::ofstream(run_dir / "trace" /
                              ("slot_" + std::to_string(m.slot) + ".json"))
                    << slot_to_json(m).dump(1) << "\n";
            }
            append_run_rows(rows, points[p].values, r.seed, r.run);
            totals.push_back(r.run.summary.total_embb_throughput);
            if (std::isfinite(r.run.summary.mean_jain)) {
                jains.push_back(r.run.summary.mean_jain);
            }
            infeasible += r.run.summary.infeasible_slots;
            served += r.run.summary.served_urllc;
            dropped += r.run.summary.dropped_urllc;
            latency_bad += r.run.summary.latency_violations;
        }
        auto mean_of = [](const std::vector<double>& v) {
            if (v.empty()) return std::nan("");
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        summary["runs"] = totals.size();
        summary["mean_total_embb_throughput"] = mean_of(totals);
        summary["mean_jain"] = mean_of(jains);
        summary["infeasible_slots"] = infeasible;
        summary["served_urllc"] = served;
        summary["dropped_urllc"] = dropped;
        summary["latency_violations"] = latency_bad;
        std::ofstream(point_dir / "summary.json") << summary.dump(1) << "\n";
    }
    std::ofstream(spec.out_dir / "rows.csv") << csv_encode(rows, axis_names);
    return failures == 0 ? 0 : 1;
}

}  // namespace noma::experiment
