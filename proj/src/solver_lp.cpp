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
#include <stdexcept>
#include <vector>

#include "noma/solver.hpp"

namespace noma::solver {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kArtificialTol = 1e-7;

}  // namespace

LpSolution lp_solve(const LinearProgram& prog) {
    const int n_orig = prog.num_vars();
    const int m = static_cast<int>(prog.b.size());
    if (prog.a.rows() != m || (m > 0 && prog.a.cols() != n_orig)) {
        throw std::invalid_argument("lp_solve: inconsistent dimensions");
    }
    if (!prog.nonneg.empty() && static_cast<int>(prog.nonneg.size()) != n_orig) {
        throw std::invalid_argument("lp_solve: nonneg mask size mismatch");
    }
    auto is_nonneg = [&](int j) { return prog.nonneg.empty() || prog.nonneg[j]; };

    // Free variables are split into positive and negative parts.
    std::vector<int> neg_part(n_orig, -1);
    int n = n_orig;
    for (int j = 0; j < n_orig; ++j) {
        if (!is_nonneg(j)) neg_part[j] = n++;
    }

    // Column layout: structural | slacks | artificials, then RHS.
    std::vector<int> artificial_row;  // rows that received an artificial
    for (int i = 0; i < m; ++i) {
        if (prog.b(i) < 0.0) artificial_row.push_back(i);
    }
    const int n_slack = m;
    const int n_art = static_cast<int>(artificial_row.size());
    const int total = n + n_slack + n_art;

    // Tableau rows 0..m-1 are constraints; row m is the real objective
    // (minimizing -c), row m+1 the feasibility penalty. Keeping the penalty
    // separate is big-M with the M carried symbolically.
    std::vector<std::vector<double>> t(m + 2, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(m, -1);

    int art_seen = 0;
    for (int i = 0; i < m; ++i) {
        const double sign = prog.b(i) < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n_orig; ++j) {
            const double v = sign * prog.a(i, j);
            t[i][j] += v;
            if (neg_part[j] >= 0) t[i][neg_part[j]] -= v;
        }
        t[i][n + i] = sign;  // slack
        t[i][total] = sign * prog.b(i);
        if (sign < 0.0) {
            const int art_col = n + n_slack + art_seen++;
            t[i][art_col] = 1.0;
            basis[i] = art_col;
        } else {
            basis[i] = n + i;
        }
    }

    // Objective rows hold reduced costs; price out the initial basis.
    for (int j = 0; j < n_orig; ++j) {
        t[m][j] = -prog.c(j);
        if (neg_part[j] >= 0) t[m][neg_part[j]] = prog.c(j);
    }
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n + n_slack) {  // artificial basic, penalty cost 1
            for (int j = 0; j <= total; ++j) t[m + 1][j] -= t[i][j];
        }
    }

    const auto is_artificial = [&](int col) { return col >= n + n_slack; };

    const long max_pivots = 2000L + 50L * static_cast<long>(total + 1) * (m + 1);
    for (long iter = 0;; ++iter) {
        if (iter > max_pivots) {
            throw std::runtime_error("lp_solve: pivot limit exceeded");
        }
        // Bland's rule: smallest-index column whose two-level reduced cost
        // (penalty first) is negative.
        int enter = -1;
        for (int j = 0; j < total; ++j) {
            if (is_artificial(j)) continue;
            const double rp = t[m + 1][j];
            const double rr = t[m][j];
            if (rp < -kCostTol || (std::abs(rp) <= kCostTol && rr < -kCostTol)) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;  // optimal for the two-level objective

        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (t[i][enter] > kPivotTol) {
                const double ratio = t[i][total] / t[i][enter];
                if (leave < 0 || ratio < best_ratio - kPivotTol ||
                    (std::abs(ratio - best_ratio) <= kPivotTol && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) {
            // No limit on the entering column. If the penalty is already
            // cleared this is a genuinely unbounded objective.
            double art_sum = 0.0;
            for (int i = 0; i < m; ++i) {
                if (is_artificial(basis[i])) art_sum += t[i][total];
            }
            LpSolution sol;
            sol.status = art_sum > kArtificialTol ? LpStatus::Infeasible : LpStatus::Unbounded;
            return sol;
        }

        // Pivot.
        const double piv = t[leave][enter];
        for (int j = 0; j <= total; ++j) t[leave][j] /= piv;
        for (int i = 0; i < m + 2; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    double art_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (is_artificial(basis[i])) art_sum += t[i][total];
    }
    if (art_sum > kArtificialTol) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    Vec full = Vec::Zero(n);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) full(basis[i]) = t[i][total];
    }
    LpSolution sol;
    sol.status = LpStatus::Feasible;
    sol.x = Vec::Zero(n_orig);
    for (int j = 0; j < n_orig; ++j) {
        sol.x(j) = full(j) - (neg_part[j] >= 0 ? full(neg_part[j]) : 0.0);
    }
    sol.objective = prog.c.dot(sol.x);
    return sol;
}

}  // namespace noma::solver
