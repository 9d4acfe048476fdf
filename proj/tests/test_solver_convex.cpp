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
#include <vector>

#include "doctest.h"
#include "noma/channel.hpp"
#include "noma/solver.hpp"

using namespace noma;
using solver::Mat;
using solver::Vec;

namespace {

// min x - ln(x) over x > 0; optimum x = 1, value 1.
solver::LogAffineProgram toy_program() {
    solver::LogAffineProgram p;
    p.num_vars = 1;
    solver::LogTerm t;
    t.weight = -1.0;
    t.a = Vec::Ones(1);
    t.offset = 0.0;
    p.objective_logs.push_back(t);
    p.objective_linear = Vec::Ones(1);
    p.lin_a = Mat::Zero(0, 1);
    p.lin_b = Vec::Zero(0);
    p.lower = Vec::Zero(1);
    return p;
}

// Random convex instance with positive log coefficients so the domain covers
// the positive orthant; includes one concave constraint and one budget row.
solver::LogAffineProgram random_program(std::uint64_t seed, int n) {
    channel::GaussianStream g(seed, 0, channel::StreamKind::Embb, 17);
    solver::LogAffineProgram p;
    p.num_vars = n;
    for (int i = 0; i < 2 * n; ++i) {
        solver::LogTerm t;
        t.weight = -g.next_uniform();
        t.a = Vec(n);
        for (int j = 0; j < n; ++j) t.a(j) = g.next_uniform();
        t.offset = 0.2 + g.next_uniform();
        p.objective_logs.push_back(t);
    }
    p.objective_linear = Vec(n);
    for (int j = 0; j < n; ++j) p.objective_linear(j) = g.next_uniform();

    solver::LogAffineProgram::ConcaveConstraint c;
    solver::LogTerm t;
    t.weight = 1.0;
    t.a = Vec(n);
    for (int j = 0; j < n; ++j) t.a(j) = 0.5 + g.next_uniform();
    t.offset = 1.0;
    c.logs.push_back(t);
    c.linear = Vec::Zero(n);
    c.constant = -0.05;  // ln(arg) >= 0.05, loose at moderate x
    c.name = "floor";
    p.constraints.push_back(c);

    p.lin_a = Mat::Ones(1, n);
    p.lin_b = Vec(1);
    p.lin_b << 2.0;
    p.lower = Vec::Zero(n);
    return p;
}

}  // namespace

TEST_CASE("toy problem settles at the stationary point") {
    const auto p = toy_program();
    Vec x0 = Vec::Ones(1) * 3.0;
    const auto sol = solver::convex_solve(p, x0);
    REQUIRE(sol.status == solver::ConvexStatus::Ok);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sol.kkt_residual <= 1e-6);
    CHECK(sol.objective <= p.objective_value(x0) + 1e-9);

    // analytic optimum with the exact (zero) multiplier
    CHECK(solver::kkt_residual(p, Vec::Ones(1), Vec::Zero(1)) <= 1e-10);
    // a random interior non-optimal point is visibly non-stationary
    CHECK(solver::kkt_residual(p, Vec::Ones(1) * 2.5, Vec::Zero(1)) > 1e-3);
}

TEST_CASE("start point must be strictly interior") {
    const auto p = toy_program();
    Vec bad = Vec::Zero(1);
    const auto sol = solver::convex_solve(p, bad);
    CHECK(sol.status == solver::ConvexStatus::StartPointNotInterior);
}

TEST_CASE("sign conventions are validated at construction") {
    auto p = toy_program();
    p.objective_logs[0].weight = 1.0;  // convexity violated
    Vec x0 = Vec::Ones(1);
    CHECK_THROWS_AS(solver::convex_solve(p, x0), std::invalid_argument);

    auto q = random_program(1, 3);
    q.constraints[0].logs[0].weight = -1.0;  // concavity violated
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("objective gradient and hessian match central differences") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_program(100 + trial, 4);
        channel::GaussianStream g(trial, 1, channel::StreamKind::Embb, 23);
        for (int pt = 0; pt < 10; ++pt) {
            Vec x(4);
            for (int i = 0; i < 4; ++i) x(i) = 0.1 + 0.3 * g.next_uniform();
            const Vec grad = p.objective_gradient(x);
            const Mat hess = p.objective_hessian(x);
            const double h = 1e-6;
            for (int i = 0; i < 4; ++i) {
                Vec xp = x, xm = x;
                xp(i) += h;
                xm(i) -= h;
                const double fd = (p.objective_value(xp) - p.objective_value(xm)) / (2 * h);
                CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-5));
                const Vec gp = p.objective_gradient(xp);
                const Vec gm = p.objective_gradient(xm);
                for (int j = 0; j < 4; ++j) {
                    const double fdh = (gp(j) - gm(j)) / (2 * h);
                    CHECK(hess(i, j) == doctest::Approx(fdh).epsilon(1e-5));
                }
            }
        }
    }
}

TEST_CASE("solutions respect constraints, stay interior, and improve on x0") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_program(200 + trial, 4);
        Vec x0 = Vec::Ones(4) * 0.3;
        REQUIRE(p.interior_margin(x0) > 0.0);
        const auto sol = solver::convex_solve(p, x0);
        REQUIRE(sol.status == solver::ConvexStatus::Ok);
        CHECK(sol.kkt_residual <= 1e-6);
        CHECK(sol.objective <= p.objective_value(x0) + 1e-9);
        CHECK(p.constraint_value(0, sol.x) >= -1e-6);
        CHECK((p.lin_a * sol.x - p.lin_b).maxCoeff() <= 1e-6);
        for (const auto& t : p.objective_logs) {
            CHECK(t.a.dot(sol.x) + t.offset >= 1e-12);
        }
        CHECK((sol.x.array() >= 1e-12).all());
        // deterministic
        const auto sol2 = solver::convex_solve(p, x0);
        CHECK(sol.x == sol2.x);
    }
}

TEST_CASE("kkt residual shrinks along the barrier path") {
    const auto p = random_program(300, 3);
    Vec x0 = Vec::Ones(3) * 0.3;
    double prev = 1e100;
    for (double floor : {1e-2, 1e-4, 1e-6, 1e-8}) {
        solver::BarrierOptions opts;
        opts.mu_floor_times_m = floor;
        const auto sol = solver::convex_solve(p, x0, opts);
        REQUIRE(sol.status == solver::ConvexStatus::Ok);
        CHECK(sol.kkt_residual < prev + 1e-12);
        prev = sol.kkt_residual;
    }
}

TEST_CASE("two-variable instance agrees with a dense grid search") {
    // min -ln(x1+0.2) - 0.7 ln(x2+0.1) + 0.3 x1, x1+x2 <= 1, x >= 0
    solver::LogAffineProgram p;
    p.num_vars = 2;
    solver::LogTerm t1;
    t1.weight = -1.0;
    t1.a = Vec(2);
    t1.a << 1.0, 0.0;
    t1.offset = 0.2;
    solver::LogTerm t2;
    t2.weight = -0.7;
    t2.a = Vec(2);
    t2.a << 0.0, 1.0;
    t2.offset = 0.1;
    p.objective_logs = {t1, t2};
    p.objective_linear = Vec(2);
    p.objective_linear << 0.3, 0.0;
    p.lin_a = Mat::Ones(1, 2);
    p.lin_b = Vec::Ones(1);
    p.lower = Vec::Zero(2);

    Vec x0 = Vec::Ones(2) * 0.2;
    const auto sol = solver::convex_solve(p, x0);
    REQUIRE(sol.status == solver::ConvexStatus::Ok);

    double best = 1e100;
    const int grid = 2000;
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid - i; ++j) {
            Vec x(2);
            x << i / static_cast<double>(grid), j / static_cast<double>(grid);
            best = std::min(best, p.objective_value(x));
        }
    }
    CHECK(sol.objective == doctest::Approx(best).epsilon(1e-4));
    CHECK(sol.objective <= best + 1e-9);  // solver at least as good as any grid point
}
