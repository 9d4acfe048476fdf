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
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "doctest.h"
#include "noma/channel.hpp"
#include "noma/clustering.hpp"

using namespace noma;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Labeled assignment count: sum over ordered size vectors of multinomials.
double closed_form_count(int k, int m, int min_size) {
    double total = 0.0;
    std::vector<int> comp(m, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == m - 1) {
            if (left >= min_size) {
                comp[pos] = left;
                double ways = factorial(k);
                for (int c : comp) ways /= factorial(c);
                total += ways;
            }
            return;
        }
        for (int s = min_size; left - s >= min_size * (m - 1 - pos); ++s) {
            comp[pos] = s;
            rec(pos + 1, left - s);
        }
    };
    rec(0, k);
    return total;
}

// Max-min decode-pair SINR over a dense sweep of the two-user power simplex,
// honoring the budget and any rate floors. Independent of the LP machinery.
double grid_max_min_sinr(const std::vector<clustering::SinrUser>& users, double budget,
                         int points) {
    double best = -1.0;
    for (int i = 0; i <= points; ++i) {
        const double a0 = budget * i / points;
        const double a1 = budget - a0;  // budget binds at the optimum
        const std::vector<double> alpha{a0, a1};
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (size_t k = 0; k < users.size() && ok; ++k) {
            for (size_t j = k; j < users.size(); ++j) {
                double interf = 0.0;
                for (size_t l = 0; l < j; ++l) interf += users[k].gain * alpha[l];
                const double sinr = users[k].gain * alpha[j] / (interf + users[k].noise);
                worst = std::min(worst, sinr);
                const double cj = std::pow(2.0, users[j].r_min) - 1.0;
                if (users[k].gain * alpha[j] < cj * (interf + users[k].noise)) ok = false;
            }
        }
        if (ok) best = std::max(best, worst);
    }
    return best;
}

}  // namespace

TEST_CASE("partition counts match the combinatorial forms") {
    CHECK(clustering::enumerate_partitions(4, 2).size() == 6);
    CHECK(clustering::enumerate_partitions(5, 2).size() == 20);
    CHECK(clustering::enumerate_partitions(9, 3, 2, {4, 3, 2}).size() == 1260);
    for (int m = 1; m <= 3; ++m) {
        for (int k = 2 * m; k <= 10; ++k) {
            const auto parts = clustering::enumerate_partitions(k, m);
            CHECK(static_cast<double>(parts.size()) == closed_form_count(k, m, 2));
            std::set<std::vector<int>> seen;
            for (const auto& p : parts) seen.insert(p.cluster_of);
            CHECK(seen.size() == parts.size());
        }
    }
}

TEST_CASE("partition enumeration rejects undersized instances") {
    CHECK_THROWS_AS(clustering::enumerate_partitions(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(clustering::enumerate_partitions(9, 3, 2, {6, 2, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(clustering::enumerate_partitions(9, 3, 2, {1, 4, 4}),
                    std::invalid_argument);
}

TEST_CASE("target LP is feasible at zero target with zero rate floors") {
    std::vector<clustering::SinrUser> users{{2.0, 0.01, 0.0}, {1.0, 0.01, 0.0}};
    const auto lp = clustering::sinr_target_lp(users, 0.0, 0.5);
    CHECK(solver::lp_solve(lp).status == solver::LpStatus::Feasible);
}

TEST_CASE("single user feasibility boundary is gain*budget/noise") {
    const double g = 1.7, n0 = 0.002, budget = 0.4;
    std::vector<clustering::SinrUser> users{{g, n0, 0.0}};
    const double bound = g * budget / n0;
    auto probe = [&](double theta) {
        return solver::lp_solve(clustering::sinr_target_lp(users, theta, budget)).status ==
               solver::LpStatus::Feasible;
    };
    CHECK(probe(bound * (1.0 - 1e-5)));
    CHECK(!probe(bound * (1.0 + 1e-5)));
}

TEST_CASE("two-user feasibility boundary matches a dense power sweep") {
    channel::GaussianStream rng(77, 0, channel::StreamKind::Embb, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double g0 = 0.5 + 2.0 * rng.next_uniform();
        const double g1 = 0.1 + g0 * rng.next_uniform() * 0.9;  // keep decreasing order
        std::vector<clustering::SinrUser> users{{g0, 1e-3, 0.0}, {g1, 1e-3, 0.0}};
        const double budget = 0.5;
        const auto eval = clustering::bisect_max_min_sinr(users, budget, 1e-6);
        REQUIRE(eval.has_value());
        const double theta_grid = grid_max_min_sinr(users, budget, 10000);
        // the sweep underestimates by at most one grid cell of power
        const double cell = budget / 10000.0;
        const double slope = g0 / 1e-3;  // steepest SINR change per unit power
        CHECK(eval->theta_star >= theta_grid - 2e-6);
        CHECK(eval->theta_star <= theta_grid + slope * cell + 2e-6);
    }
}

TEST_CASE("bisection on a single user hits the closed form") {
    std::vector<clustering::SinrUser> users{{1.0, 0.01, 0.0}};
    const auto eval = clustering::bisect_max_min_sinr(users, 1.0, 1e-6);
    REQUIRE(eval.has_value());
    CHECK(eval->theta_star == doctest::Approx(100.0).epsilon(1e-6));
    double total = 0.0;
    for (double a : eval->alpha) total += a;
    CHECK(total <= 1.0 + 1e-9);
}

TEST_CASE("bisection returns infeasible when the rate floor exceeds capacity") {
    // capacity log2(1 + g*P/n) is about 6.6 here; ask for more
    std::vector<clustering::SinrUser> users{{1.0, 0.01, 8.0}};
    CHECK(!clustering::bisect_max_min_sinr(users, 1.0, 1e-6).has_value());
}

TEST_CASE("bisection brackets: feasible at theta_star, infeasible at theta_star + 2 delta") {
    channel::GaussianStream rng(78, 0, channel::StreamKind::Embb, 0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<clustering::SinrUser> users;
        double last = 2.0 + rng.next_uniform();
        for (int i = 0; i < 3; ++i) {
            users.push_back({last, 1e-3, 0.2});
            last *= 0.5 + 0.4 * rng.next_uniform();
        }
        const double budget = 0.4;
        const double delta = 1e-6;
        const auto eval = clustering::bisect_max_min_sinr(users, budget, delta);
        REQUIRE(eval.has_value());
        auto feasible = [&](double theta) {
            return solver::lp_solve(clustering::sinr_target_lp(users, theta, budget)).status ==
                   solver::LpStatus::Feasible;
        };
        CHECK(feasible(eval->theta_star));
        CHECK(!feasible(eval->theta_star + 2 * delta));
    }
}

TEST_CASE("cluster_users: single cluster returns the unique partition") {
    clustering::GainTable t;
    t.num_users = 2;
    t.num_clusters = 1;
    t.gain = {{1.0}, {0.5}};
    t.noise = {{0.001}, {0.001}};
    const auto res = clustering::cluster_users(t, {0.0, 0.0}, 1, 1e-6);
    CHECK(res.assignment.cluster_of == std::vector<int>{0, 0});
    const auto eval = clustering::bisect_max_min_sinr(
        {{1.0, 0.001, 0.0}, {0.5, 0.001, 0.0}}, 1.0, 1e-6);
    REQUIRE(eval.has_value());
    CHECK(res.sinr_min == doctest::Approx(eval->theta_star).epsilon(1e-9));
}

TEST_CASE("cluster_users equals exhaustive evaluation and avoids bad groupings") {
    // users 0 and 1 barely register in cluster 0; any partition keeping both
    // of them there starves that cluster
    clustering::GainTable t;
    t.num_users = 4;
    t.num_clusters = 2;
    t.gain = {{1e-4, 2.0}, {1e-4, 1.5}, {3.0, 1e-4}, {2.5, 1e-4}};
    t.noise = std::vector<std::vector<double>>(4, std::vector<double>(2, 1e-3));
    const std::vector<double> r_min(4, 0.0);
    const auto res = clustering::cluster_users(t, r_min, 2, 1e-6);

    double best = -1.0;
    std::vector<int> best_assign;
    for (const auto& part : clustering::enumerate_partitions(4, 2)) {
        double score = std::numeric_limits<double>::infinity();
        for (int c = 0; c < 2; ++c) {
            std::vector<clustering::SinrUser> users;
            std::vector<std::pair<double, int>> order;
            for (int u = 0; u < 4; ++u) {
                if (part.cluster_of[u] == c) order.emplace_back(-t.gain[u][c], u);
            }
            std::sort(order.begin(), order.end());
            for (auto& [ng, u] : order) users.push_back({t.gain[u][c], t.noise[u][c], 0.0});
            const auto eval =
                clustering::bisect_max_min_sinr(users, part.sizes[c] / 4.0, 1e-6);
            REQUIRE(eval.has_value());
            score = std::min(score, eval->theta_star);
        }
        if (score > best) {
            best = score;
            best_assign = part.cluster_of;
        }
    }
    CHECK(res.sinr_min == doctest::Approx(best).epsilon(1e-4));
    CHECK(res.assignment.cluster_of == best_assign);
    CHECK(!(res.assignment.cluster_of[0] == 0 && res.assignment.cluster_of[1] == 0));
}

TEST_CASE("cluster_users reports infeasibility when rate floors are unreachable") {
    clustering::GainTable t;
    t.num_users = 2;
    t.num_clusters = 1;
    t.gain = {{1.0}, {0.9}};
    t.noise = {{0.001}, {0.001}};
    CHECK_THROWS_AS(clustering::cluster_users(t, {20.0, 20.0}, 1, 1e-6), std::runtime_error);
}
