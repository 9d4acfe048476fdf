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
#include <limits>
#include <vector>

#include "doctest.h"
#include "noma/channel.hpp"
#include "noma/solver.hpp"

using namespace noma;
using solver::Mat;
using solver::Vec;

namespace {

// Brute-force oracle: enumerate vertices as intersections of n tight
// constraints (rows plus axes), keep feasible ones, take the best objective.
double vertex_enum_best(const solver::LinearProgram& lp) {
    const int n = lp.num_vars();
    const int m = static_cast<int>(lp.b.size());
    Mat c_all(m + n, n);
    Vec d_all(m + n);
    c_all.topRows(m) = lp.a;
    d_all.head(m) = lp.b;
    c_all.bottomRows(n) = -Mat::Identity(n, n);
    d_all.tail(n).setZero();

    double best = -std::numeric_limits<double>::infinity();
    const int total = m + n;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        Mat s(n, n);
        Vec t(n);
        for (int i = 0; i < n; ++i) {
            s.row(i) = c_all.row(idx[i]);
            t(i) = d_all(idx[i]);
        }
        Eigen::FullPivLU<Mat> lu(s);
        if (lu.isInvertible()) {
            const Vec x = lu.solve(t);
            if (((c_all * x - d_all).array() <= 1e-9).all()) {
                best = std::max(best, lp.c.dot(x));
            }
        }
        int pos = n - 1;
        while (pos >= 0 && idx[pos] == total - n + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("one-variable maximum at the bound") {
    solver::LinearProgram lp;
    lp.c = Vec::Ones(1);
    lp.a = Mat::Ones(1, 1);
    lp.b = Vec::Ones(1);
    const auto sol = solver::lp_solve(lp);
    REQUIRE(sol.status == solver::LpStatus::Feasible);
    CHECK(sol.x(0) == doctest::Approx(1.0));
    CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible sum constraint") {
    solver::LinearProgram lp;
    lp.c = Vec::Zero(2);
    lp.a = Mat::Ones(1, 2);
    lp.b = -Vec::Ones(1);
    CHECK(solver::lp_solve(lp).status == solver::LpStatus::Infeasible);
}

TEST_CASE("unbounded objective is reported") {
    solver::LinearProgram lp;
    lp.c = Vec::Ones(1);
    lp.a = Mat::Zero(0, 1);
    lp.b = Vec::Zero(0);
    CHECK(solver::lp_solve(lp).status == solver::LpStatus::Unbounded);
}

TEST_CASE("negative right-hand sides go through the feasibility phase") {
    // x >= 1, x <= 2, maximize x
    solver::LinearProgram lp;
    lp.c = Vec::Ones(1);
    lp.a = Mat(2, 1);
    lp.a << -1.0, 1.0;
    lp.b = Vec(2);
    lp.b << -1.0, 2.0;
    const auto sol = solver::lp_solve(lp);
    REQUIRE(sol.status == solver::LpStatus::Feasible);
    CHECK(sol.objective == doctest::Approx(2.0));

    lp.c(0) = -1.0;  // now minimize x: settles on the lower bound
    const auto sol2 = solver::lp_solve(lp);
    REQUIRE(sol2.status == solver::LpStatus::Feasible);
    CHECK(sol2.x(0) == doctest::Approx(1.0));
}

TEST_CASE("free variables reach negative values") {
    solver::LinearProgram lp;
    lp.c = Vec(1);
    lp.c << -1.0;
    lp.a = Mat(1, 1);
    lp.a << -1.0;  // -x <= 5, i.e. x >= -5
    lp.b = Vec(1);
    lp.b << 5.0;
    lp.nonneg = {false};
    const auto sol = solver::lp_solve(lp);
    REQUIRE(sol.status == solver::LpStatus::Feasible);
    CHECK(sol.x(0) == doctest::Approx(-5.0));
    CHECK(sol.objective == doctest::Approx(5.0));
}

TEST_CASE("random five-variable programs match vertex enumeration") {
    channel::GaussianStream g(41, 0, channel::StreamKind::Embb, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 5;
        const int m = 6;
        solver::LinearProgram lp;
        lp.c = Vec(n);
        for (int i = 0; i < n; ++i) lp.c(i) = 2.0 * g.next_uniform() - 1.0;
        // rows kept feasible at a random interior point, plus a bounding box
        Vec x0(n);
        for (int i = 0; i < n; ++i) x0(i) = g.next_uniform() + 0.05;
        lp.a = Mat(m + n, n);
        lp.b = Vec(m + n);
        for (int r = 0; r < m; ++r) {
            for (int i = 0; i < n; ++i) lp.a(r, i) = 2.0 * g.next_uniform() - 1.0;
            lp.b(r) = lp.a.row(r).dot(x0) + 0.05 + g.next_uniform();
        }
        lp.a.bottomRows(n) = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i) lp.b(m + i) = 2.0 + g.next_uniform();

        const auto sol = solver::lp_solve(lp);
        REQUIRE(sol.status == solver::LpStatus::Feasible);
        CHECK(((lp.a * sol.x - lp.b).array() <= 1e-9).all());
        CHECK((sol.x.array() >= -1e-9).all());
        const double best = vertex_enum_best(lp);
        CHECK(sol.objective == doctest::Approx(best).epsilon(1e-7));
    }
}

TEST_CASE("solver is deterministic") {
    solver::LinearProgram lp;
    lp.c = Vec(3);
    lp.c << 1.0, 2.0, 0.5;
    lp.a = Mat(3, 3);
    lp.a << 1, 1, 1, -1, 2, 0, 0, 1, 3;
    lp.b = Vec(3);
    lp.b << 4, 2, 6;
    const auto a = solver::lp_solve(lp);
    const auto b = solver::lp_solve(lp);
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
}
