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

#include "noma/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noma::clustering {

std::vector<std::vector<int>> ClusterAssignment::members() const {
    std::vector<std::vector<int>> out(sizes.size());
    for (int u = 0; u < static_cast<int>(cluster_of.size()); ++u) {
        out[cluster_of[u]].push_back(u);
    }
    return out;
}

std::vector<ClusterAssignment> enumerate_partitions(int num_users, int num_clusters, int min_size,
                                                    const std::vector<int>& size_profile) {
    if (num_users < min_size * num_clusters) {
        throw std::invalid_argument(
            "enumerate_partitions: fewer users than min_size per cluster allows");
    }
    if (!size_profile.empty()) {
        if (static_cast<int>(size_profile.size()) != num_clusters) {
            throw std::invalid_argument("enumerate_partitions: size_profile length != clusters");
        }
        int sum = 0;
        for (int s : size_profile) {
            if (s < min_size) {
                throw std::invalid_argument("enumerate_partitions: profile below min_size");
            }
            sum += s;
        }
        if (sum != num_users) {
            throw std::invalid_argument("enumerate_partitions: profile does not sum to K");
        }
    }
    double raw = std::pow(static_cast<double>(num_clusters), num_users);
    if (raw > 2e7) {
        throw std::invalid_argument("enumerate_partitions: search space too large for desk scale");
    }

    std::vector<ClusterAssignment> out;
    std::vector<int> assign(num_users, 0);
    std::vector<int> sizes(num_clusters, 0);
    // Odometer over labeled assignments, lexicographic and duplicate-free.
    while (true) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int u = 0; u < num_users; ++u) ++sizes[assign[u]];
        bool ok = true;
        for (int c = 0; c < num_clusters && ok; ++c) {
            if (sizes[c] < min_size) ok = false;
            if (!size_profile.empty() && sizes[c] != size_profile[c]) ok = false;
        }
        if (ok) out.push_back(ClusterAssignment{assign, sizes});

        int pos = num_users - 1;
        while (pos >= 0 && assign[pos] == num_clusters - 1) assign[pos--] = 0;
        if (pos < 0) break;
        ++assign[pos];
    }
    return out;
}

solver::LinearProgram sinr_target_lp(const std::vector<SinrUser>& users, double theta,
                                     double budget, bool pairwise) {
    const int n = static_cast<int>(users.size());
    if (n == 0) throw std::invalid_argument("sinr_target_lp: empty cluster");
    if (theta < 0.0) throw std::invalid_argument("sinr_target_lp: negative target");
    for (int k = 1; k < n; ++k) {
        if (users[k].gain > users[k - 1].gain + 1e-12) {
            throw std::invalid_argument("sinr_target_lp: users must be in decreasing-gain order");
        }
    }

    std::vector<std::pair<double, int>> row_specs;  // (threshold, decoder) per message row
    int rows = 0;
    for (int k = 0; k < n; ++k) rows += pairwise ? 2 * (n - k) : 2;
    rows += 1;  // budget

    solver::LinearProgram lp;
    lp.c = solver::Vec::Zero(n);
    lp.a = solver::Mat::Zero(rows, n);
    lp.b = solver::Vec::Zero(rows);

    int r = 0;
    auto add_row = [&](int decoder, int message, double threshold) {
        // gain_k * alpha_j >= threshold * (gain_k * sum_{l<j} alpha_l + noise_k)
        const double g = users[decoder].gain;
        for (int l = 0; l < message; ++l) lp.a(r, l) = threshold * g;
        lp.a(r, message) -= g;
        lp.b(r) = -threshold * users[decoder].noise;
        ++r;
    };
    for (int k = 0; k < n; ++k) {
        const int j_end = pairwise ? n : k + 1;
        for (int j = k; j < j_end; ++j) {
            add_row(k, j, theta);
            add_row(k, j, std::pow(2.0, users[j].r_min) - 1.0);
        }
    }
    for (int j = 0; j < n; ++j) lp.a(r, j) = 1.0;
    lp.b(r) = budget;
    return lp;
}

std::optional<ClusterEvaluation> bisect_max_min_sinr(const std::vector<SinrUser>& users,
                                                     double budget, double delta, bool pairwise) {
    if (delta <= 0.0) throw std::invalid_argument("bisect_max_min_sinr: delta must be > 0");
    auto probe = [&](double theta) {
        return solver::lp_solve(sinr_target_lp(users, theta, budget, pairwise));
    };
    auto base = probe(0.0);
    if (base.status != solver::LpStatus::Feasible) return std::nullopt;

    double lb = 0.0;
    double ub = 0.0;
    for (const SinrUser& u : users) ub = std::max(ub, budget * u.gain / u.noise);
    std::vector<double> alpha(base.x.data(), base.x.data() + base.x.size());

    for (int it = 0; it < 400 && ub - lb >= delta; ++it) {
        const double mid = 0.5 * (lb + ub);
        auto sol = probe(mid);
        if (sol.status == solver::LpStatus::Feasible) {
            lb = mid;
            alpha.assign(sol.x.data(), sol.x.data() + sol.x.size());
        } else {
            ub = mid;
        }
    }
    return ClusterEvaluation{lb, std::move(alpha)};
}

GainTable build_gain_table(const channel::ChannelRealization& chan, double rho) {
    GainTable t;
    t.num_users = static_cast<int>(chan.embb_h.size());
    t.num_clusters = t.num_users > 0 ? static_cast<int>(chan.embb_h[0].cols()) : 0;
    t.gain.assign(t.num_users, std::vector<double>(t.num_clusters, 0.0));
    t.noise.assign(t.num_users, std::vector<double>(t.num_clusters, 0.0));
    for (int u = 0; u < t.num_users; ++u) {
        for (int c = 0; c < t.num_clusters; ++c) {
            const auto det = channel::detection_vector(chan.embb_h[u], c);
            t.gain[u][c] = det.gain;
            t.noise[u][c] = det.v.squaredNorm() / rho;
        }
    }
    return t;
}

ClusteringResult cluster_users(const GainTable& table, const std::vector<double>& r_min_per_user,
                               int num_clusters, double delta, int min_size,
                               const std::vector<int>& size_profile, bool pairwise) {
    const int k = table.num_users;
    if (static_cast<int>(r_min_per_user.size()) != k) {
        throw std::invalid_argument("cluster_users: r_min list not aligned with users");
    }
    const auto partitions = enumerate_partitions(k, num_clusters, min_size, size_profile);

    auto cluster_members = [&](const ClusterAssignment& asg, int c) {
        std::vector<SinrUser> users;
        std::vector<std::pair<double, int>> order;
        for (int u = 0; u < k; ++u) {
            if (asg.cluster_of[u] == c) order.emplace_back(-table.gain[u][c], u);
        }
        std::stable_sort(order.begin(), order.end());
        for (const auto& [neg_gain, u] : order) {
            users.push_back(SinrUser{table.gain[u][c], table.noise[u][c], r_min_per_user[u]});
        }
        return users;
    };

    double best = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int pi = 0; pi < static_cast<int>(partitions.size()); ++pi) {
        const auto& asg = partitions[pi];
        double score = std::numeric_limits<double>::infinity();
        bool alive = true;
        for (int c = 0; c < num_clusters && alive; ++c) {
            const auto users = cluster_members(asg, c);
            const double budget = static_cast<double>(asg.sizes[c]) / k;
            // A partition only matters if every cluster clears the incumbent,
            // so probe the incumbent first and skip the full bisection when
            // the cluster already loses.
            if (best_index >= 0 && best > 0.0) {
                auto probe = solver::lp_solve(sinr_target_lp(users, best, budget, pairwise));
                if (probe.status != solver::LpStatus::Feasible) {
                    alive = false;
                    break;
                }
            }
            auto eval = bisect_max_min_sinr(users, budget, delta, pairwise);
            if (!eval) {
                alive = false;
                break;
            }
            score = std::min(score, eval->theta_star);
            if (score <= best) {
                alive = false;  // cannot beat the incumbent, min over clusters only shrinks
                break;
            }
        }
        if (alive && score > best) {
            best = score;
            best_index = pi;
        }
    }
    if (best_index < 0) {
        throw std::runtime_error("cluster_users: every partition fails the rate floors");
    }
    return ClusteringResult{partitions[best_index], best};
}

}  // namespace noma::clustering
