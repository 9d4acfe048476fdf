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

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace noma::solver {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------- linear ---

/// maximize c^T x  subject to  A x <= b  and  x_i >= 0 where nonneg[i].
/// A zero objective turns the call into a pure feasibility check.
struct LinearProgram {
    Vec c;
    Mat a;
    Vec b;
    std::vector<bool> nonneg;  // empty means all variables nonnegative

    int num_vars() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { Feasible, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective = 0.0;
};

/// Dense primal simplex with Bland's rule. Infeasibility is detected with a
/// big-M phase carried symbolically (two-level reduced costs), so no literal
/// large constant enters the arithmetic.
LpSolution lp_solve(const LinearProgram& prog);

// ---------------------------------------------------------------- convex ---

/// weight * ln(a^T x + offset)
struct LogTerm {
    double weight = 0.0;
    Vec a;
    double offset = 0.0;
};

/// minimize  sum_i w_i ln(a_i^T x + o_i) + c^T x + d       (all w_i <= 0)
/// subject to, for each nonlinear row,
///            sum_j w_j ln(a_j^T x + o_j) + e^T x + f >= 0 (all w_j >= 0),
/// linear rows G x <= h, and bounds x >= lower (strictly interior iterates).
/// Sign conditions are checked at construction time via validate().
struct LogAffineProgram {
    int num_vars = 0;

    std::vector<LogTerm> objective_logs;
    Vec objective_linear;
    double objective_constant = 0.0;

    struct ConcaveConstraint {
        std::vector<LogTerm> logs;
        Vec linear;
        double constant = 0.0;
        std::string name;
    };
    std::vector<ConcaveConstraint> constraints;

    Mat lin_a;  // rows x num_vars, may be 0 x n
    Vec lin_b;
    Vec lower;  // elementwise lower bounds

    void validate() const;  // throws std::invalid_argument on sign violations

    double objective_value(const Vec& x) const;
    Vec objective_gradient(const Vec& x) const;
    Mat objective_hessian(const Vec& x) const;
    double constraint_value(int j, const Vec& x) const;

    /// Smallest slack over all constraints, log domains and bounds; positive
    /// iff x is strictly interior.
    double interior_margin(const Vec& x) const;

    int num_inequalities() const {
        return static_cast<int>(constraints.size()) + static_cast<int>(lin_b.size()) + num_vars;
    }
};

struct BarrierOptions {
    double mu_initial = 1.0;
    double mu_shrink = 0.1;
    double mu_floor_times_m = 1e-8;  // stop when mu * (constraint count) below this
    double armijo = 0.01;
    double backtrack_shrink = 0.5;
    int max_backtracks = 60;
    int max_newton_iters = 120;
    double newton_tol = 1e-16;  // on half the squared Newton decrement
    double grad_tol = 1e-8;     // on the barrier gradient norm
};

enum class ConvexStatus { Ok, StartPointNotInterior, LineSearchFailed };

struct ConvexSolution {
    ConvexStatus status = ConvexStatus::Ok;
    Vec x;  // last iterate when status != Ok
    double objective = 0.0;
    double kkt_residual = 0.0;
    Vec multipliers;  // one per inequality (nonlinear rows, linear rows, bounds)
    int newton_iterations = 0;
};

/// Log-barrier method with damped Newton steps. x0 must be strictly interior;
/// a non-interior start yields status StartPointNotInterior without iterating.
ConvexSolution convex_solve(const LogAffineProgram& prog, const Vec& x0,
                            const BarrierOptions& opts = {});

/// Norm of the KKT stationarity residual plus total complementarity slack at
/// (x, multipliers). Multipliers are ordered as in ConvexSolution.
double kkt_residual(const LogAffineProgram& prog, const Vec& x, const Vec& multipliers);

}  // namespace noma::solver
