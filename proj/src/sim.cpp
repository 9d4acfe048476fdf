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

#include "noma/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace noma::sim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct SlotContext {
    int arrivals = 0;
    std::vector<double> embb_gain;                 // per eMBB user, own cluster
    std::vector<double> embb_noise;
    std::vector<std::vector<double>> urllc_gain;   // [arrival][cluster]
    std::vector<std::vector<double>> urllc_noise;
};

SlotContext build_slot_context(const PeriodState& ps, int slot) {
    const ScenarioConfig& cfg = ps.cfg;
    const double rho = cfg.rho_linear();
    SlotContext ctx;
    const auto chan = channel::sample_channels(cfg.seed, slot, cfg.num_embb,
                                               cfg.num_rx_antennas, cfg.num_clusters);
    ctx.embb_gain.resize(cfg.num_embb);
    ctx.embb_noise.resize(cfg.num_embb);
    for (int u = 0; u < cfg.num_embb; ++u) {
        const int c = ps.assignment.cluster_of[u];
        const auto det = channel::detection_vector(chan.embb_h[u], c);
        ctx.embb_gain[u] = det.gain;
        ctx.embb_noise[u] = det.v.squaredNorm() / rho;
    }
    ctx.arrivals = cfg.arrivals.arrivals_at(slot, cfg.seed);
    ctx.urllc_gain.resize(ctx.arrivals);
    ctx.urllc_noise.resize(ctx.arrivals);
    for (int a = 0; a < ctx.arrivals; ++a) {
        const auto h = channel::sample_user_matrix(cfg.seed, slot, channel::StreamKind::Urllc, a,
                                                   cfg.num_rx_antennas, cfg.num_clusters);
        ctx.urllc_gain[a].resize(cfg.num_clusters);
        ctx.urllc_noise[a].resize(cfg.num_clusters);
        for (int c = 0; c < cfg.num_clusters; ++c) {
            const auto det = channel::detection_vector(h, c);
            ctx.urllc_gain[a][c] = det.gain;
            ctx.urllc_noise[a][c] = det.v.squaredNorm() / rho;
        }
    }
    return ctx;
}

/// Post-puncture ordered state. punctures maps an eMBB user to the arrival
/// replacing it for this slot.
power::SystemState build_state(const PeriodState& ps, const SlotContext& ctx,
                               const std::map<int, int>& punctures, bool relax_rmin) {
    const ScenarioConfig& cfg = ps.cfg;
    const double rho = cfg.rho_linear();
    power::SystemState state;
    state.qos = cfg.qos;
    const double urllc_req = cfg.qos.urllc_rate_requirement();
    for (int c = 0; c < cfg.num_clusters; ++c) {
        std::vector<rates::Member> members;
        int cluster_size = 0;
        for (int u = 0; u < cfg.num_embb; ++u) {
            if (ps.assignment.cluster_of[u] != c) continue;
            ++cluster_size;
            auto it = punctures.find(u);
            if (it == punctures.end()) {
                members.push_back(rates::Member{u, rates::UserKind::Embb, ctx.embb_gain[u],
                                                ctx.embb_noise[u],
                                                relax_rmin ? 0.0 : cfg.r_min_per_user[u]});
            } else {
                const int a = it->second;
                members.push_back(rates::Member{a, rates::UserKind::Urllc, ctx.urllc_gain[a][c],
                                                ctx.urllc_noise[a][c], urllc_req});
            }
        }
        state.clusters.push_back(rates::make_ordered(c, std::move(members), rho));
        state.budgets.push_back(static_cast<double>(cluster_size) / cfg.num_embb);
    }
    return state;
}

double total_embb_rate_of(const power::SystemState& state,
                          const std::vector<std::vector<double>>& member_rate) {
    double total = 0.0;
    for (size_t c = 0; c < state.clusters.size(); ++c) {
        for (size_t k = 0; k < state.clusters[c].members.size(); ++k) {
            if (state.clusters[c].members[k].kind == rates::UserKind::Embb) {
                total += member_rate[c][k];
            }
        }
    }
    return total;
}

std::vector<std::vector<double>> rates_from_gamma(const power::SystemState& state,
                                                  const power::PowerAllocation& alloc,
                                                  const rates::QosSpec& qos) {
    std::vector<std::vector<double>> out;
    for (size_t c = 0; c < state.clusters.size(); ++c) {
        const auto& cl = state.clusters[c];
        std::vector<double> r(cl.members.size(), 0.0);
        for (size_t k = 0; k < cl.members.size(); ++k) {
            const double sinr =
                rates::effective_sinr(cl, alloc.gamma[c], static_cast<int>(k));
            r[k] = cl.members[k].kind == rates::UserKind::Embb
                       ? rates::shannon_rate(sinr)
                       : rates::fbl_rate(sinr, qos.blocklength, qos.reliability_eps);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<double> baseline_equal(int num_members, double budget) {
    if (num_members < 1) throw std::invalid_argument("baseline_equal: empty cluster");
    return std::vector<double>(num_members, budget / num_members);
}

std::vector<double> baseline_fixed(int num_members, double budget) {
    if (num_members < 1) throw std::invalid_argument("baseline_fixed: empty cluster");
    const double denom = num_members * (num_members + 1) / 2.0;
    std::vector<double> out(num_members);
    for (int k = 0; k < num_members; ++k) {
        out[k] = budget * (k + 1) / denom;  // position 0 is the strongest, gets the least
    }
    return out;
}

std::optional<std::vector<double>> baseline_bcc(const rates::OrderedClusterState& cluster,
                                                double budget, double pinned_rate) {
    const int n = static_cast<int>(cluster.members.size());
    if (n < 1) throw std::invalid_argument("baseline_bcc: empty cluster");
    if (n == 1) return std::vector<double>{budget};
    const double c = std::pow(2.0, pinned_rate) - 1.0;
    // Each pinned power is affine in the best user's power: gamma_k = a_k * g0 + b_k.
    std::vector<double> a(n, 0.0), b(n, 0.0);
    a[0] = 1.0;
    double prefix_a = 1.0, prefix_b = 0.0;
    for (int k = 1; k < n; ++k) {
        const auto& m = cluster.members[k];
        a[k] = c * prefix_a;
        b[k] = c * (prefix_b + m.noise / m.gain);
        prefix_a += a[k];
        prefix_b += b[k];
    }
    const double g0 = (budget - prefix_b) / prefix_a;
    if (!(g0 > 0.0)) return std::nullopt;
    std::vector<double> gamma(n);
    for (int k = 0; k < n; ++k) gamma[k] = a[k] * g0 + b[k];
    return gamma;
}

std::vector<double> baseline_oma_rates(const rates::OrderedClusterState& cluster, double budget,
                                       const rates::QosSpec& qos) {
    const int n = static_cast<int>(cluster.members.size());
    if (n < 1) throw std::invalid_argument("baseline_oma: empty cluster");
    const double fraction = 1.0 / n;
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        const auto& m = cluster.members[k];
        const double sinr = m.gain * budget / m.noise;  // sole occupant of its fraction
        out[k] = fraction * (m.kind == rates::UserKind::Embb
                                 ? rates::shannon_rate(sinr)
                                 : rates::fbl_rate(sinr, qos.blocklength, qos.reliability_eps));
    }
    return out;
}

AllocationOutcome allocate_power(Scheduler scheduler, const power::SystemState& state,
                                 const ScenarioConfig& cfg) {
    AllocationOutcome out;
    switch (scheduler) {
        case Scheduler::Adaptive: {
            auto start = power::find_feasible_start(state);
            if (!start.allocation) return out;
            power::ScaOptions opts;
            opts.tol = cfg.sca_tol;
            opts.max_iterations = cfg.sca_max_iterations;
            auto res = power::sca_allocate(state, *start.allocation, opts);
            out.feasible = true;
            out.gamma = std::move(res.allocation);
            out.iterations = res.trace.iterations;
            out.converged = res.trace.converged;
            out.surrogate_trace = res.trace.surrogate_values;
            out.member_rate = rates_from_gamma(state, out.gamma, cfg.qos);
            return out;
        }
        case Scheduler::Equal: {
            for (size_t c = 0; c < state.clusters.size(); ++c) {
                out.gamma.gamma.push_back(baseline_equal(
                    static_cast<int>(state.clusters[c].members.size()), state.budgets[c]));
            }
            break;
        }
        case Scheduler::Fixed: {
            for (size_t c = 0; c < state.clusters.size(); ++c) {
                out.gamma.gamma.push_back(baseline_fixed(
                    static_cast<int>(state.clusters[c].members.size()), state.budgets[c]));
            }
            break;
        }
        case Scheduler::Bcc: {
            for (size_t c = 0; c < state.clusters.size(); ++c) {
                auto g = baseline_bcc(state.clusters[c], state.budgets[c], cfg.bcc_r_min);
                if (!g) return out;  // cascade exceeds the cluster budget
                out.gamma.gamma.push_back(std::move(*g));
            }
            break;
        }
        case Scheduler::Oma: {
            out.feasible = true;
            for (size_t c = 0; c < state.clusters.size(); ++c) {
                const int n = static_cast<int>(state.clusters[c].members.size());
                out.member_rate.push_back(
                    baseline_oma_rates(state.clusters[c], state.budgets[c], cfg.qos));
                // Record the time-averaged power: full budget over a 1/n share.
                out.gamma.gamma.push_back(std::vector<double>(n, state.budgets[c] / n));
            }
            return out;
        }
    }
    out.feasible = true;
    out.member_rate = rates_from_gamma(state, out.gamma, cfg.qos);
    return out;
}

namespace {

matching::PunctureValueTable build_value_table(const PeriodState& ps, const SlotContext& ctx) {
    const ScenarioConfig& cfg = ps.cfg;
    matching::PunctureValueTable table;
    table.num_arrivals = ctx.arrivals;
    for (int u = 0; u < cfg.num_embb; ++u) {
        table.slots.push_back(matching::SlotRef{ps.assignment.cluster_of[u], u});
    }
    table.value.resize(ctx.arrivals);
    for (int a = 0; a < ctx.arrivals; ++a) {
        for (int si = 0; si < static_cast<int>(table.slots.size()); ++si) {
            const std::map<int, int> solo = {{table.slots[si].embb_user, a}};
            const auto state = build_state(ps, ctx, solo, false);
            if (cfg.proxy_preference) {
                // Cheap ranking: total eMBB rate under an equal split. Not
                // part of the reference scheme; enabled only by config.
                auto outcome = allocate_power(Scheduler::Equal, state, cfg);
                table.value[a][si] = total_embb_rate_of(state, outcome.member_rate);
            } else {
                auto outcome = allocate_power(cfg.scheduler, state, cfg);
                if (outcome.feasible) {
                    table.value[a][si] = total_embb_rate_of(state, outcome.member_rate);
                }
            }
        }
    }
    return table;
}

matching::PunctureValueTable subset_table(const matching::PunctureValueTable& full,
                                          const std::vector<bool>& active) {
    matching::PunctureValueTable t = full;
    for (int a = 0; a < t.num_arrivals; ++a) {
        if (!active[a]) t.value[a].clear();
    }
    return t;
}

}  // namespace

SlotMetrics run_slot(PeriodState& ps, int slot) {
    const ScenarioConfig& cfg = ps.cfg;
    SlotMetrics m;
    m.slot = slot;
    const SlotContext ctx = build_slot_context(ps, slot);

    std::vector<bool> active(ctx.arrivals, true);
    std::map<int, int> punctures;  // eMBB user -> arrival
    matching::PunctureValueTable table;

    if (ctx.arrivals > 0) {
        table = build_value_table(ps, ctx);
        std::vector<int> counts;
        for (const auto& s : table.slots) counts.push_back(ps.puncture_counts[s.embb_user]);
        const auto prefs = matching::build_preferences(table, counts);
        const auto matched = matching::gale_shapley(prefs);
        for (int a = 0; a < ctx.arrivals; ++a) {
            const auto si = matched.slot_of(a);
            if (si) {
                punctures[table.slots[*si].embb_user] = a;
            } else {
                active[a] = false;
                m.events.push_back("unmatched arrival " + std::to_string(a) +
                                   " dropped (no feasible slot)");
            }
        }
    }

    bool relax = false;
    power::SystemState state;
    AllocationOutcome outcome;
    bool slot_feasible = true;
    while (true) {
        state = build_state(ps, ctx, punctures, relax);
        outcome = allocate_power(cfg.scheduler, state, cfg);
        if (outcome.feasible) break;
        if (cfg.fallback == FallbackPolicy::Abort) {
            slot_feasible = false;
            m.events.push_back("infeasible slot: abort policy");
            break;
        }
        if (cfg.fallback == FallbackPolicy::RelaxRmin) {
            if (!relax) {
                relax = true;
                m.events.push_back("infeasible slot: relaxing eMBB rate floors to zero");
                continue;
            }
            slot_feasible = false;
            m.events.push_back("infeasible slot even with relaxed rate floors");
            break;
        }
        // Drop policy: shed the least valuable matched arrival and re-match.
        if (punctures.empty()) {
            slot_feasible = false;
            m.events.push_back("infeasible slot with no punctures left to drop");
            break;
        }
        int drop_arrival = -1;
        double drop_value = std::numeric_limits<double>::infinity();
        for (const auto& [u, a] : punctures) {
            int si = -1;
            for (int i = 0; i < static_cast<int>(table.slots.size()); ++i) {
                if (table.slots[i].embb_user == u) si = i;
            }
            const double v = table.feasible(a, si) ? table.value[a].at(si) : 0.0;
            if (v < drop_value || (v == drop_value && a > drop_arrival)) {
                drop_value = v;
                drop_arrival = a;
            }
        }
        active[drop_arrival] = false;
        m.events.push_back("dropped arrival " + std::to_string(drop_arrival) +
                           " after infeasible allocation");
        std::vector<int> counts;
        for (const auto& s : table.slots) counts.push_back(ps.puncture_counts[s.embb_user]);
        const auto prefs = matching::build_preferences(subset_table(table, active), counts);
        const auto rematch = matching::gale_shapley(prefs);
        punctures.clear();
        for (int a = 0; a < ctx.arrivals; ++a) {
            if (!active[a]) continue;
            const auto si = rematch.slot_of(a);
            if (si) punctures[table.slots[*si].embb_user] = a;
        }
    }

    m.feasible = slot_feasible;
    m.embb_rate.assign(cfg.num_embb, slot_feasible ? 0.0 : kNan);
    if (!slot_feasible) {
        m.total_embb_rate = kNan;
        m.jain = kNan;
        for (int a = 0; a < ctx.arrivals; ++a) {
            m.urllc.push_back(UrllcOutcome{a, false, true, -1, -1, 0.0, false});
        }
        return m;
    }

    m.state = state;
    m.gamma = outcome.gamma.gamma;
    m.sca_iterations = outcome.iterations;
    m.sca_converged = outcome.converged;
    m.surrogate_trace = outcome.surrogate_trace;

    std::vector<double> surviving;
    for (size_t c = 0; c < state.clusters.size(); ++c) {
        const auto& cl = state.clusters[c];
        double power_sum = 0.0;
        for (size_t k = 0; k < cl.members.size(); ++k) {
            power_sum += outcome.gamma.gamma[c][k];
            if (cl.members[k].kind == rates::UserKind::Embb) {
                m.embb_rate[cl.members[k].user_id] = outcome.member_rate[c][k];
                surviving.push_back(outcome.member_rate[c][k]);
            }
        }
        m.cluster_power.push_back(power_sum);
    }
    m.total_embb_rate = 0.0;
    for (double r : surviving) m.total_embb_rate += r;
    m.jain = (!surviving.empty() && m.total_embb_rate > 0.0) ? rates::jain_index(surviving)
                                                             : kNan;

    for (int a = 0; a < ctx.arrivals; ++a) {
        UrllcOutcome uo;
        uo.arrival = a;
        auto it = std::find_if(punctures.begin(), punctures.end(),
                               [a](const auto& p) { return p.second == a; });
        if (it == punctures.end()) {
            uo.dropped = true;
        } else {
            uo.matched = true;
            uo.embb_user = it->first;
            uo.cluster = ps.assignment.cluster_of[it->first];
            const auto& cl = state.clusters[uo.cluster];
            for (size_t k = 0; k < cl.members.size(); ++k) {
                if (cl.members[k].kind == rates::UserKind::Urllc &&
                    cl.members[k].user_id == a) {
                    uo.rate = outcome.member_rate[uo.cluster][k];
                }
            }
            uo.latency_met = rates::latency_ok(cfg.qos, uo.rate);
            ps.puncture_counts[it->first] += 1;
        }
        m.urllc.push_back(uo);
    }
    return m;
}

RunResult run_period(const ScenarioConfig& config) {
    ScenarioConfig cfg = config;
    cfg.resolve_defaults();
    cfg.validate();

    const auto chan = channel::sample_channels(cfg.seed, cfg.reference_slot, cfg.num_embb,
                                               cfg.num_rx_antennas, cfg.num_clusters);
    const auto table = clustering::build_gain_table(chan, cfg.rho_linear());
    RunResult result;
    result.clustering =
        clustering::cluster_users(table, cfg.r_min_per_user, cfg.num_clusters, cfg.delta,
                                  cfg.min_cluster_size, cfg.size_profile,
                                  cfg.pairwise_clustering);

    PeriodState ps{cfg, result.clustering.assignment,
                   std::vector<int>(cfg.num_embb, 0)};
    for (int slot = 1; slot <= cfg.num_slots; ++slot) {
        result.slots.push_back(run_slot(ps, slot));
    }

    RunSummary& s = result.summary;
    s.clustering_sinr_min = result.clustering.sinr_min;
    double jain_sum = 0.0;
    int jain_count = 0;
    for (const auto& m : result.slots) {
        if (!m.feasible) {
            ++s.infeasible_slots;
            continue;
        }
        s.total_embb_throughput += m.total_embb_rate;
        if (std::isfinite(m.jain)) {
            jain_sum += m.jain;
            ++jain_count;
        }
        for (const auto& u : m.urllc) {
            if (u.matched) {
                ++s.served_urllc;
                if (!u.latency_met) ++s.latency_violations;
            } else {
                ++s.dropped_urllc;
            }
        }
    }
    s.mean_jain = jain_count > 0 ? jain_sum / jain_count : kNan;
    return result;
}

std::vector<std::string> audit_slot(const SlotMetrics& m, const ScenarioConfig& cfg) {
    std::vector<std::string> violations;
    if (!m.feasible) return violations;
    const double tol = 1e-6;
    const bool qos_bound = cfg.scheduler == Scheduler::Adaptive;

    std::map<int, int> seen_slot;  // eMBB user -> times punctured this slot
    for (const auto& u : m.urllc) {
        if (u.matched && u.dropped) {
            violations.push_back("arrival " + std::to_string(u.arrival) +
                                 " both matched and dropped");
        }
        if (u.matched) seen_slot[u.embb_user] += 1;
    }
    for (const auto& [user, times] : seen_slot) {
        if (times > 1) {
            violations.push_back("eMBB user " + std::to_string(user) +
                                 " punctured more than once");
        }
    }

    for (size_t c = 0; c < m.state.clusters.size(); ++c) {
        const auto& cl = m.state.clusters[c];
        if (m.gamma.size() != m.state.clusters.size() ||
            m.gamma[c].size() != cl.members.size()) {
            violations.push_back("power vector misaligned with state");
            return violations;
        }
        double sum = 0.0;
        for (size_t k = 0; k < cl.members.size(); ++k) {
            const double g = m.gamma[c][k];
            sum += g;
            if (!(g > 0.0)) {
                violations.push_back("nonpositive power in cluster " + std::to_string(c));
            }
        }
        if (sum > m.state.budgets[c] + 1e-9) {
            violations.push_back("budget exceeded in cluster " + std::to_string(c));
        }
        if (!qos_bound) continue;
        for (size_t k = 0; k < cl.members.size(); ++k) {
            const double sinr = rates::effective_sinr(cl, m.gamma[c], static_cast<int>(k));
            if (cl.members[k].kind == rates::UserKind::Embb) {
                const double rate = rates::shannon_rate(sinr);
                if (rate < cl.members[k].rate_req - tol) {
                    violations.push_back("eMBB user " + std::to_string(cl.members[k].user_id) +
                                         " below its rate floor");
                }
            } else {
                const double rate = rates::fbl_rate(sinr, cfg.qos.blocklength,
                                                    cfg.qos.reliability_eps);
                if (rate < cfg.qos.urllc_rate_requirement() - tol) {
                    violations.push_back("URLLC arrival " +
                                         std::to_string(cl.members[k].user_id) +
                                         " misses its latency rate");
                }
            }
        }
    }
    return violations;
}

}  // namespace noma::sim
