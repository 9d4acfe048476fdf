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
#include <string>
#include <vector>

#include "noma/rates.hpp"
#include "noma/solver.hpp"

namespace noma::power {

/// All clusters of one mini slot after puncturing and re-ordering, plus the
/// per-cluster power budgets. Punctured users are absent; their budget share
/// stays with the cluster.
struct SystemState {
    std::vector<rates::OrderedClusterState> clusters;
    std::vector<double> budgets;  // aligned with clusters
    rates::QosSpec qos;

    int total_members() const;
    /// Flat index of (cluster, position) in the stacked power vector.
    int flat_index(int cluster, int position) const;
};

/// Per-cluster positive power coefficients aligned with the ordered members.
struct PowerAllocation {
    std::vector<std::vector<double>> gamma;

    solver::Vec flatten() const;
    static PowerAllocation from_flat(const SystemState& state, const solver::Vec& x);
};

// ----------------------------------------------------- d.c. decomposition ---
// The negated eMBB sum rate splits into a difference of two convex terms,
// each a negative sum of log2 of affine interference expressions. The first
// uses every power up to the user's own position, the second stops one short.

double dc_first(const SystemState& state, const solver::Vec& gamma);
double dc_second(const SystemState& state, const solver::Vec& gamma);

/// Gradient of dc_second. Component (c,k) collects the weaker-ordered eMBB
/// users of cluster c whose interference expression contains gamma[c,k].
solver::Vec grad_dc_second(const SystemState& state, const solver::Vec& gamma);

/// Negated total eMBB Shannon rate, equal to dc_first - dc_second.
double neg_embb_sum_rate(const SystemState& state, const solver::Vec& gamma);

/// Convex surrogate of neg_embb_sum_rate anchored at `anchor`: the second
/// term is replaced by its tangent plane.
double surrogate_value(const SystemState& state, const solver::Vec& gamma,
                       const solver::Vec& anchor);

// ------------------------------------------------- per-user concave pieces ---

/// log2 of the interference-plus-noise expression of member (cluster,
/// position): the concave piece linearized inside every rate constraint.
double interference_log2(const SystemState& state, int cluster, int position,
                         const solver::Vec& gamma);
solver::Vec grad_interference_log2(const SystemState& state, int cluster, int position,
                                   const solver::Vec& gamma);

/// sqrt of the channel dispersion of member (cluster, position), written
/// directly as a function of the power vector.
double dispersion_sqrt(const SystemState& state, int cluster, int position,
                       const solver::Vec& gamma);
solver::Vec grad_dispersion_sqrt(const SystemState& state, int cluster, int position,
                                 const solver::Vec& gamma);

// ------------------------------------------------------------- iteration ---

/// Convex subproblem at the current iterate: surrogate objective, tangent
/// upper bounds inside the URLLC finite-blocklength rows and the eMBB
/// minimum-rate rows, budgets and positivity. Throws std::invalid_argument
/// when the anchor is not strictly interior.
solver::LogAffineProgram build_sca_subproblem(const SystemState& state,
                                              const solver::Vec& anchor);

struct ScaTrace {
    std::vector<solver::Vec> iterates;     // accepted point per pass
    std::vector<double> surrogate_values;  // optimal subproblem value per pass
    std::vector<double> exact_values;      // negated eMBB sum rate per pass
    int iterations = 0;
    bool converged = false;
};

struct ScaOptions {
    double tol = 1e-6;
    int max_iterations = 200;
    solver::BarrierOptions barrier;
};

struct ScaResult {
    PowerAllocation allocation;
    ScaTrace trace;
};

/// Iterative convexification: solve the subproblem, re-anchor, repeat until
/// the optimal value settles. gamma_init must satisfy every original
/// constraint with positive slack; use find_feasible_start to obtain one.
/// Throws std::invalid_argument on an infeasible start.
ScaResult sca_allocate(const SystemState& state, const PowerAllocation& gamma_init,
                       const ScaOptions& opts = {});

struct InfeasibleReport {
    std::string worst_constraint;
    double violation = 0.0;
};

/// Strictly feasible starting point. The rate requirements translate to
/// per-user SINR thresholds, which makes the search a slack-maximizing
/// linear program; the proportional split is returned unchanged when it
/// already has enough slack. Returns the report on infeasible slots.
struct FeasibleStart {
    std::optional<PowerAllocation> allocation;
    InfeasibleReport report;  // set when allocation is empty
};

FeasibleStart find_feasible_start(const SystemState& state, double min_slack = 1e-8);

/// Slack of every original constraint at gamma (positive = satisfied):
/// URLLC finite-blocklength rate rows, eMBB minimum-rate rows, budget rows,
/// positivity rows. Used by audits and by find_feasible_start.
std::vector<std::pair<std::string, double>> constraint_slacks(const SystemState& state,
                                                              const solver::Vec& gamma);

}  // namespace noma::power
