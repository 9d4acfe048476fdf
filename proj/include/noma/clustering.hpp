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

#include <optional>
#include <vector>

#include "noma/channel.hpp"
#include "noma/solver.hpp"

namespace noma::clustering {

/// Labeled partition of eMBB users into clusters (cluster ids matter).
struct ClusterAssignment {
    std::vector<int> cluster_of;  // user id -> cluster id in [0, M)
    std::vector<int> sizes;       // per-cluster user count

    std::vector<std::vector<int>> members() const;  // per-cluster user ids, ascending
};

/// Exhaustive, duplicate-free enumeration of labeled assignments with every
/// cluster holding at least min_size users; when size_profile is nonempty,
/// cluster c must hold exactly size_profile[c] users. Deterministic
/// lexicographic order over the assignment vector.
std::vector<ClusterAssignment> enumerate_partitions(int num_users, int num_clusters,
                                                    int min_size = 2,
                                                    const std::vector<int>& size_profile = {});

/// One user as seen by the max-min feasibility program: effective gain and
/// noise in decreasing-gain order plus its minimum-rate requirement.
struct SinrUser {
    double gain = 0.0;
    double noise = 0.0;   // ||v||^2 / rho
    double r_min = 0.0;
};

/// Feasibility program asking whether every decode pair of the cluster can
/// reach SINR >= theta while meeting per-user minimum rates under the power
/// budget. Users must be in decreasing-gain order. With pairwise=false only
/// each user's own decode position is constrained.
solver::LinearProgram sinr_target_lp(const std::vector<SinrUser>& users, double theta,
                                     double budget, bool pairwise = true);

struct ClusterEvaluation {
    double theta_star = 0.0;          // max-min SINR within bisection tolerance
    std::vector<double> alpha;        // a feasible power vector at theta_star
};

/// Bisection over the SINR target with LP feasibility as the oracle.
/// Returns nullopt when even theta = 0 fails the minimum-rate rows.
std::optional<ClusterEvaluation> bisect_max_min_sinr(const std::vector<SinrUser>& users,
                                                     double budget, double delta,
                                                     bool pairwise = true);

/// Gain/noise table for every (user, candidate cluster) pair, precomputed
/// once per channel realization since detection depends only on the user's
/// own cluster label.
struct GainTable {
    int num_users = 0;
    int num_clusters = 0;
    std::vector<std::vector<double>> gain;   // [user][cluster]
    std::vector<std::vector<double>> noise;  // [user][cluster]
};

GainTable build_gain_table(const channel::ChannelRealization& chan, double rho);

struct ClusteringResult {
    ClusterAssignment assignment;
    double sinr_min = 0.0;  // min over clusters of theta_star for the winner
};

/// Exhaustive search over partitions maximizing the smallest per-cluster
/// max-min SINR. Ties resolve to the earlier enumerated partition. Throws
/// std::runtime_error when every partition is infeasible.
ClusteringResult cluster_users(const GainTable& table, const std::vector<double>& r_min_per_user,
                               int num_clusters, double delta, int min_size = 2,
                               const std::vector<int>& size_profile = {}, bool pairwise = true);

}  // namespace noma::clustering
