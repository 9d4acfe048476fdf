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

#include "noma/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noma::power {

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

int SystemState::total_members() const {
    int n = 0;
    for (const auto& c : clusters) n += static_cast<int>(c.members.size());
    return n;
}

int SystemState::flat_index(int cluster, int position) const {
    int base = 0;
    for (int c = 0; c < cluster; ++c) base += static_cast<int>(clusters[c].members.size());
    return base + position;
}

solver::Vec PowerAllocation::flatten() const {
    int n = 0;
    for (const auto& g : gamma) n += static_cast<int>(g.size());
    solver::Vec x(n);
    int i = 0;
    for (const auto& g : gamma) {
        for (double v : g) x(i++) = v;
    }
    return x;
}

PowerAllocation PowerAllocation::from_flat(const SystemState& state, const solver::Vec& x) {
    PowerAllocation out;
    int i = 0;
    for (const auto& c : state.clusters) {
        std::vector<double> g(c.members.size());
        for (double& v : g) v = x(i++);
        out.gamma.push_back(std::move(g));
    }
    return out;
}

namespace {

// Interference-plus-noise seen by member (c, k), optionally including the
// member's own power (inclusive = the signal-bearing variant).
double affine_term(const SystemState& state, const solver::Vec& gamma, int c, int k,
                   bool inclusive) {
    const auto& cl = state.clusters[c];
    const double g = cl.members[k].gain;
    double acc = cl.members[k].noise;
    const int end = inclusive ? k + 1 : k;
    for (int l = 0; l < end; ++l) acc += g * gamma(state.flat_index(c, l));
    return acc;
}

void check_positive_logs(const SystemState& state, const solver::Vec& gamma) {
    if (gamma.size() != state.total_members()) {
        throw std::invalid_argument("power vector not aligned with state");
    }
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        for (size_t k = 0; k < state.clusters[c].members.size(); ++k) {
            if (affine_term(state, gamma, c, static_cast<int>(k), true) <= 0.0) {
                throw std::domain_error("nonpositive log argument in rate expression");
            }
        }
    }
}

}  // namespace

double dc_first(const SystemState& state, const solver::Vec& gamma) {
    check_positive_logs(state, gamma);
    double v = 0.0;
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            if (cl.members[k].kind != rates::UserKind::Embb) continue;
            v -= std::log2(affine_term(state, gamma, c, k, true));
        }
    }
    return v;
}

double dc_second(const SystemState& state, const solver::Vec& gamma) {
    check_positive_logs(state, gamma);
    double v = 0.0;
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            if (cl.members[k].kind != rates::UserKind::Embb) continue;
            v -= std::log2(affine_term(state, gamma, c, k, false));
        }
    }
    return v;
}

solver::Vec grad_dc_second(const SystemState& state, const solver::Vec& gamma) {
    check_positive_logs(state, gamma);
    solver::Vec grad = solver::Vec::Zero(state.total_members());
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            if (cl.members[k].kind != rates::UserKind::Embb) continue;
            const double d2 = affine_term(state, gamma, c, k, false);
            const double coeff = -cl.members[k].gain / (kLn2 * d2);
            for (int l = 0; l < k; ++l) grad(state.flat_index(c, l)) += coeff;
        }
    }
    return grad;
}

double neg_embb_sum_rate(const SystemState& state, const solver::Vec& gamma) {
    return dc_first(state, gamma) - dc_second(state, gamma);
}

double surrogate_value(const SystemState& state, const solver::Vec& gamma,
                       const solver::Vec& anchor) {
    const solver::Vec grad = grad_dc_second(state, anchor);
    return dc_first(state, gamma) - dc_second(state, anchor) - grad.dot(gamma - anchor);
}

double interference_log2(const SystemState& state, int cluster, int position,
                         const solver::Vec& gamma) {
    const double d2 = affine_term(state, gamma, cluster, position, false);
    if (d2 <= 0.0) throw std::domain_error("interference_log2: nonpositive argument");
    return std::log2(d2);
}

solver::Vec grad_interference_log2(const SystemState& state, int cluster, int position,
                                   const solver::Vec& gamma) {
    solver::Vec grad = solver::Vec::Zero(state.total_members());
    const double d2 = affine_term(state, gamma, cluster, position, false);
    const double g = state.clusters[cluster].members[position].gain;
    for (int l = 0; l < position; ++l) {
        grad(state.flat_index(cluster, l)) = g / (kLn2 * d2);
    }
    return grad;
}

double dispersion_sqrt(const SystemState& state, int cluster, int position,
                       const solver::Vec& gamma) {
    const auto& m = state.clusters[cluster].members[position];
    const double a = m.gain * gamma(state.flat_index(cluster, position));
    const double b = affine_term(state, gamma, cluster, position, false);
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("dispersion_sqrt: needs interior point");
    return std::sqrt(a * (a + 2.0 * b)) / (a + b);
}

solver::Vec grad_dispersion_sqrt(const SystemState& state, int cluster, int position,
                                 const solver::Vec& gamma) {
    const auto& m = state.clusters[cluster].members[position];
    const double g = m.gain;
    const double a = g * gamma(state.flat_index(cluster, position));
    const double b = affine_term(state, gamma, cluster, position, false);
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("grad_dispersion_sqrt: needs interior point");
    const double root = std::sqrt(a) * std::sqrt(a + 2.0 * b);
    const double denom = (a + b) * (a + b);
    const double d_da = b * b / (root * denom);
    const double d_db = -b * std::sqrt(a) / (std::sqrt(a + 2.0 * b) * denom);
    solver::Vec grad = solver::Vec::Zero(state.total_members());
    grad(state.flat_index(cluster, position)) = g * d_da;
    for (int l = 0; l < position; ++l) grad(state.flat_index(cluster, l)) = g * d_db;
    return grad;
}

solver::LogAffineProgram build_sca_subproblem(const SystemState& state,
                                              const solver::Vec& anchor) {
    const int n = state.total_members();
    if (anchor.size() != n) {
        throw std::invalid_argument("build_sca_subproblem: anchor has wrong dimension");
    }
    for (int i = 0; i < n; ++i) {
        if (!(anchor(i) > 0.0)) {
            throw std::invalid_argument("build_sca_subproblem: anchor must be strictly positive");
        }
    }
    state.qos.validate();
    const double fbl_coeff =
        rates::fbl_penalty_coeff(state.qos.blocklength, state.qos.reliability_eps);

    solver::LogAffineProgram prog;
    prog.num_vars = n;
    prog.lower = solver::Vec::Zero(n);

    const solver::Vec g2_grad = grad_dc_second(state, anchor);
    prog.objective_linear = -g2_grad;
    prog.objective_constant = -dc_second(state, anchor) + g2_grad.dot(anchor);

    const int num_clusters = static_cast<int>(state.clusters.size());
    for (int c = 0; c < num_clusters; ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            const auto& member = cl.members[k];
            // Signal-bearing log used by the objective (eMBB only) and by
            // every rate constraint.
            solver::LogTerm d1;
            d1.a = solver::Vec::Zero(n);
            for (int l = 0; l <= k; ++l) d1.a(state.flat_index(c, l)) = member.gain;
            d1.offset = member.noise;

            if (member.kind == rates::UserKind::Embb) {
                solver::LogTerm obj = d1;
                obj.weight = -1.0 / kLn2;
                prog.objective_logs.push_back(obj);
            }

            const double h1 = interference_log2(state, c, k, anchor);
            const solver::Vec h1_grad = grad_interference_log2(state, c, k, anchor);

            solver::LogAffineProgram::ConcaveConstraint row;
            solver::LogTerm lt = d1;
            lt.weight = 1.0 / kLn2;
            row.logs.push_back(lt);
            if (member.kind == rates::UserKind::Embb) {
                row.linear = -h1_grad;
                row.constant = -h1 + h1_grad.dot(anchor) - member.rate_req;
                row.name = "embb_rate[" + std::to_string(c) + ":" +
                           std::to_string(member.user_id) + "]";
            } else {
                const double h2 = dispersion_sqrt(state, c, k, anchor);
                const solver::Vec h2_grad = grad_dispersion_sqrt(state, c, k, anchor);
                row.linear = -h1_grad - fbl_coeff * h2_grad;
                row.constant = -h1 + h1_grad.dot(anchor) -
                               fbl_coeff * (h2 - h2_grad.dot(anchor)) - member.rate_req;
                row.name = "urllc_rate[" + std::to_string(c) + ":" +
                           std::to_string(member.user_id) + "]";
            }
            prog.constraints.push_back(std::move(row));
        }
    }

    prog.lin_a = solver::Mat::Zero(num_clusters, n);
    prog.lin_b = solver::Vec(num_clusters);
    for (int c = 0; c < num_clusters; ++c) {
        for (size_t k = 0; k < state.clusters[c].members.size(); ++k) {
            prog.lin_a(c, state.flat_index(c, static_cast<int>(k))) = 1.0;
        }
        prog.lin_b(c) = state.budgets[c];
    }
    prog.validate();
    return prog;
}

std::vector<std::pair<std::string, double>> constraint_slacks(const SystemState& state,
                                                              const solver::Vec& gamma) {
    std::vector<std::pair<std::string, double>> out;
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const auto& cl = state.clusters[c];
        double sum = 0.0;
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            const auto& m = cl.members[k];
            const double own = gamma(state.flat_index(c, k));
            sum += own;
            const double denom = affine_term(state, gamma, c, k, false);
            const double sinr = std::max(m.gain * own / denom, 0.0);
            double rate = 0.0;
            if (m.kind == rates::UserKind::Embb) {
                rate = rates::shannon_rate(sinr);
                out.emplace_back("embb_rate[" + std::to_string(c) + ":" +
                                     std::to_string(m.user_id) + "]",
                                 rate - m.rate_req);
            } else {
                rate = rates::fbl_rate(sinr, state.qos.blocklength, state.qos.reliability_eps);
                out.emplace_back("urllc_rate[" + std::to_string(c) + ":" +
                                     std::to_string(m.user_id) + "]",
                                 rate - m.rate_req);
            }
            out.emplace_back(
                "positivity[" + std::to_string(c) + ":" + std::to_string(m.user_id) + "]", own);
        }
        out.emplace_back("budget[" + std::to_string(c) + "]", state.budgets[c] - sum);
    }
    return out;
}

FeasibleStart find_feasible_start(const SystemState& state, double min_slack) {
    FeasibleStart result;
    const int n = state.total_members();
    if (n == 0) {
        result.report = {"empty state", 0.0};
        return result;
    }

    auto min_slack_of = [&](const solver::Vec& g) {
        double worst = std::numeric_limits<double>::infinity();
        std::string name;
        for (const auto& [nm, s] : constraint_slacks(state, g)) {
            if (s < worst) {
                worst = s;
                name = nm;
            }
        }
        return std::make_pair(worst, name);
    };

    // Proportional split, pulled a hair inside the budget face.
    solver::Vec prop(n);
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const int sz = static_cast<int>(state.clusters[c].members.size());
        for (int k = 0; k < sz; ++k) {
            prop(state.flat_index(c, k)) = state.budgets[c] * (1.0 - 1e-6) / sz;
        }
    }
    if (auto [worst, name] = min_slack_of(prop); worst >= std::max(min_slack, 1e-6)) {
        result.allocation = PowerAllocation::from_flat(state, prop);
        return result;
    }

    // The rate requirements are equivalent to per-user SINR thresholds, so a
    // strictly feasible point is the solution of a slack-maximizing LP.
    std::vector<double> threshold(n, 0.0);
    for (int c = 0; c < static_cast<int>(state.clusters.size()); ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            const auto& m = cl.members[k];
            double thr;
            if (m.kind == rates::UserKind::Embb) {
                thr = std::pow(2.0, m.rate_req) - 1.0;
            } else {
                thr = rates::sinr_for_fbl_rate(m.rate_req, state.qos.blocklength,
                                               state.qos.reliability_eps);
                if (!std::isfinite(thr)) {
                    result.report = {"urllc_rate[" + std::to_string(c) + ":" +
                                         std::to_string(m.user_id) + "]",
                                     std::numeric_limits<double>::infinity()};
                    return result;
                }
            }
            threshold[state.flat_index(c, k)] = thr;
        }
    }

    const int num_clusters = static_cast<int>(state.clusters.size());
    int rows = 0;
    for (const auto& cl : state.clusters) rows += static_cast<int>(cl.members.size());
    rows = rows /* sinr rows */ + n /* positivity */ + num_clusters /* budgets */;

    solver::LinearProgram lp;
    lp.c = solver::Vec::Zero(n + 1);
    lp.c(n) = 1.0;  // maximize the slack variable
    lp.a = solver::Mat::Zero(rows, n + 1);
    lp.b = solver::Vec::Zero(rows);
    lp.nonneg.assign(n + 1, true);
    lp.nonneg[n] = false;

    int r = 0;
    for (int c = 0; c < num_clusters; ++c) {
        const auto& cl = state.clusters[c];
        for (int k = 0; k < static_cast<int>(cl.members.size()); ++k) {
            const int idx = state.flat_index(c, k);
            const double thr = threshold[idx];
            const double g = cl.members[k].gain;
            // gamma_k >= thr * (sum_{l<k} gamma_l + noise/g) + slack
            lp.a(r, idx) = -1.0;
            for (int l = 0; l < k; ++l) lp.a(r, state.flat_index(c, l)) = thr;
            lp.a(r, n) = 1.0;
            lp.b(r) = -thr * cl.members[k].noise / g;
            ++r;
        }
    }
    for (int i = 0; i < n; ++i) {  // gamma_i >= slack
        lp.a(r, i) = -1.0;
        lp.a(r, n) = 1.0;
        lp.b(r) = 0.0;
        ++r;
    }
    for (int c = 0; c < num_clusters; ++c) {  // budget with slack headroom
        for (size_t k = 0; k < state.clusters[c].members.size(); ++k) {
            lp.a(r, state.flat_index(c, static_cast<int>(k))) = 1.0;
        }
        lp.a(r, n) = 1.0;
        lp.b(r) = state.budgets[c];
        ++r;
    }

    const auto sol = solver::lp_solve(lp);
    if (sol.status != solver::LpStatus::Feasible) {
        result.report = {"slack program unsolved", std::numeric_limits<double>::infinity()};
        return result;
    }
    const solver::Vec gamma = sol.x.head(n);
    const auto [worst, name] = min_slack_of(gamma);
    if (sol.x(n) <= 0.0 || worst < min_slack) {
        result.report = {name, -worst};
        return result;
    }
    result.allocation = PowerAllocation::from_flat(state, gamma);
    return result;
}

ScaResult sca_allocate(const SystemState& state, const PowerAllocation& gamma_init,
                       const ScaOptions& opts) {
    solver::Vec anchor = gamma_init.flatten();
    if (anchor.size() != state.total_members()) {
        throw std::invalid_argument("sca_allocate: allocation not aligned with state");
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string name;
        for (const auto& [nm, s] : constraint_slacks(state, anchor)) {
            if (s < worst) {
                worst = s;
                name = nm;
            }
        }
        if (!(worst > 0.0)) {
            throw std::invalid_argument(
                "sca_allocate: start point violates '" + name +
                "'; obtain one from find_feasible_start");
        }
    }

    ScaResult out;
    double prev = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= opts.max_iterations; ++p) {
        const auto prog = build_sca_subproblem(state, anchor);
        const auto sol = convex_solve(prog, anchor, opts.barrier);
        out.trace.iterations = p;
        if (sol.status != solver::ConvexStatus::Ok) {
            out.trace.converged = false;
            break;
        }
        const double w = sol.objective;
        if (p >= 2 && w > prev) {
            // Improvements have fallen under the solver's own accuracy; a
            // visible jump would mean a broken subproblem, so flag it.
            out.trace.converged = (w - prev) <= 1e-9;
            out.trace.iterations = p - 1;
            break;
        }
        out.trace.surrogate_values.push_back(w);
        anchor = sol.x;
        out.trace.iterates.push_back(anchor);
        const double exact = neg_embb_sum_rate(state, anchor);
        out.trace.exact_values.push_back(exact);
        // Stop once the optimal subproblem values settle. The re-anchored
        // surrogate equals the exact objective at the new point, so the
        // first pass can already terminate when the split is exact.
        if ((p >= 2 && std::abs(w - prev) < opts.tol) ||
            (p == 1 && std::abs(exact - w) < opts.tol)) {
            out.trace.converged = true;
            break;
        }
        prev = w;
    }
    out.allocation = PowerAllocation::from_flat(state, anchor);
    return out;
}

}  // namespace noma::power
