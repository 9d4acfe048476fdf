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
#include <iostream>

#include "noma/experiment.hpp"

namespace noma::experiment {

namespace {

power::SystemState random_state(std::uint64_t seed, int users, bool with_urllc) {
    channel::GaussianStream g(seed, 0, channel::StreamKind::Arrival, 99);
    std::vector<rates::Member> members;
    const double rho = 1000.0;
    for (int u = 0; u < users; ++u) {
        rates::Member m;
        m.user_id = u;
        m.kind = (with_urllc && u == users - 1) ? rates::UserKind::Urllc
                                                : rates::UserKind::Embb;
        m.gain = -std::log(g.next_uniform());
        m.noise = 1.0 / rho;
        m.rate_req = m.kind == rates::UserKind::Embb ? 0.2 : 1.0;
        members.push_back(m);
    }
    power::SystemState state;
    state.clusters.push_back(rates::make_ordered(0, std::move(members), rho));
    state.budgets.push_back(0.5);
    state.qos.r_min = 0.2;
    state.qos.d_max_s = 4e-3;
    state.qos.packet_bits = 4000.0;
    state.qos.bandwidth_hz = 1e6;
    return state;
}

}  // namespace

int selftest(std::ostream& os) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        os << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    // Zero-forcing residuals and unit norms over random channels.
    {
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            const auto h = channel::sample_user_matrix(11, trial, channel::StreamKind::Embb,
                                                       trial, 3, 3);
            for (int c = 0; c < 3; ++c) {
                const auto det = channel::detection_vector(h, c);
                if (std::abs(det.v.norm() - 1.0) > 1e-12) ok = false;
                for (int f = 0; f < 3; ++f) {
                    if (f == c) continue;
                    if (std::abs(det.v.dot(h.col(f))) > 1e-9) ok = false;
                }
            }
        }
        check("zero-forcing residual <= 1e-9 and unit detection norm", ok);
    }

    // Inverse Q against direct bisection on Q.
    {
        bool ok = true;
        for (double p : {0.4, 0.1, 1e-3, 1e-5, 1e-7}) {
            double lo = -40.0, hi = 40.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
            }
            if (std::abs(rates::q_inv(p) - hi) > 1e-9 * std::max(1.0, std::abs(hi))) ok = false;
        }
        check("inverse Q matches bisection to 1e-9", ok);
    }

    // Stable matching on random preference instances.
    {
        bool ok = true;
        channel::GaussianStream g(5, 0, channel::StreamKind::Arrival, 7);
        for (int trial = 0; trial < 200 && ok; ++trial) {
            matching::PunctureValueTable table;
            const int slots = 2 + static_cast<int>(g.next_uniform() * 5);
            const int arrivals = 1 + static_cast<int>(g.next_uniform() * std::min(slots, 4));
            table.num_arrivals = arrivals;
            for (int s = 0; s < slots; ++s) table.slots.push_back({0, s});
            table.value.resize(arrivals);
            for (int a = 0; a < arrivals; ++a) {
                for (int s = 0; s < slots; ++s) {
                    if (g.next_uniform() < 0.85) table.value[a][s] = g.next_uniform();
                }
            }
            const auto prefs =
                matching::build_preferences(table, std::vector<int>(slots, 0));
            if (!matching::is_stable(matching::gale_shapley(prefs), prefs)) ok = false;
        }
        check("deferred acceptance output is stable", ok);
    }

    // Analytic gradients against central differences.
    {
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial) {
            const auto state = random_state(trial, 3, true);
            const int n = state.total_members();
            solver::Vec x(n);
            channel::GaussianStream g(trial + 100, 1, channel::StreamKind::Arrival, 3);
            for (int i = 0; i < n; ++i) x(i) = 0.05 + 0.1 * g.next_uniform();
            const auto grad = power::grad_dc_second(state, x);
            for (int i = 0; i < n; ++i) {
                const double h = 1e-6;
                solver::Vec xp = x, xm = x;
                xp(i) += h;
                xm(i) -= h;
                const double fd =
                    (power::dc_second(state, xp) - power::dc_second(state, xm)) / (2 * h);
                if (std::abs(fd - grad(i)) > 1e-5 * std::max(1.0, std::abs(fd))) ok = false;
            }
        }
        check("d.c. gradient matches finite differences", ok);
    }

    // Monotone surrogate sequence on random feasible instances.
    {
        bool ok = true;
        for (int trial = 0; trial < 5; ++trial) {
            const auto state = random_state(200 + trial, 4, true);
            const auto start = power::find_feasible_start(state);
            if (!start.allocation) continue;
            const auto res = power::sca_allocate(state, *start.allocation);
            if (!res.trace.converged) ok = false;
            for (size_t i = 1; i < res.trace.surrogate_values.size(); ++i) {
                if (res.trace.surrogate_values[i] >
                    res.trace.surrogate_values[i - 1] + 1e-9) {
                    ok = false;
                }
            }
        }
        check("power iteration surrogate values non-increasing", ok);
    }

    // Bisection against the single-user closed form.
    {
        std::vector<clustering::SinrUser> users{{2.0, 0.001, 0.0}};
        const auto eval = clustering::bisect_max_min_sinr(users, 0.5, 1e-6);
        const bool ok = eval && std::abs(eval->theta_star - 1000.0) < 2e-3;
        check("max-min bisection matches closed form", ok);
    }

    return failures;
}

}  // namespace noma::experiment
