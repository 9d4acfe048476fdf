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
#include <stdexcept>

#include "noma/solver.hpp"

namespace noma::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logs_value(const std::vector<LogTerm>& logs, const Vec& x, bool& in_domain) {
    double v = 0.0;
    for (const LogTerm& t : logs) {
        const double s = t.a.dot(x) + t.offset;
        if (s <= 0.0) {
            in_domain = false;
            return 0.0;
        }
        v += t.weight * std::log(s);
    }
    return v;
}

void logs_gradient(const std::vector<LogTerm>& logs, const Vec& x, Vec& grad) {
    for (const LogTerm& t : logs) {
        const double s = t.a.dot(x) + t.offset;
        grad.noalias() += (t.weight / s) * t.a;
    }
}

void logs_hessian(const std::vector<LogTerm>& logs, const Vec& x, Mat& hess) {
    for (const LogTerm& t : logs) {
        const double s = t.a.dot(x) + t.offset;
        hess.noalias() -= (t.weight / (s * s)) * (t.a * t.a.transpose());
    }
}

}  // namespace

void LogAffineProgram::validate() const {
    auto check_dim = [&](const Vec& v, const char* what) {
        if (v.size() != num_vars) {
            throw std::invalid_argument(std::string("log-affine program: bad dimension for ") +
                                        what);
        }
    };
    check_dim(objective_linear, "objective linear part");
    check_dim(lower, "lower bounds");
    for (const LogTerm& t : objective_logs) {
        check_dim(t.a, "objective log term");
        if (t.weight > 0.0) {
            throw std::invalid_argument(
                "log-affine program: objective log weights must be <= 0 (convexity)");
        }
    }
    for (const auto& c : constraints) {
        check_dim(c.linear, "constraint linear part");
        for (const LogTerm& t : c.logs) {
            check_dim(t.a, "constraint log term");
            if (t.weight < 0.0) {
                throw std::invalid_argument(
                    "log-affine program: constraint log weights must be >= 0 (concavity)");
            }
        }
    }
    if (lin_b.size() != lin_a.rows() || (lin_a.size() > 0 && lin_a.cols() != num_vars)) {
        throw std::invalid_argument("log-affine program: inconsistent linear rows");
    }
}

double LogAffineProgram::objective_value(const Vec& x) const {
    bool ok = true;
    const double lv = logs_value(objective_logs, x, ok);
    if (!ok) return kInf;
    return lv + objective_linear.dot(x) + objective_constant;
}

Vec LogAffineProgram::objective_gradient(const Vec& x) const {
    Vec g = objective_linear;
    logs_gradient(objective_logs, x, g);
    return g;
}

Mat LogAffineProgram::objective_hessian(const Vec& x) const {
    Mat h = Mat::Zero(num_vars, num_vars);
    logs_hessian(objective_logs, x, h);
    return h;
}

double LogAffineProgram::constraint_value(int j, const Vec& x) const {
    const auto& c = constraints[j];
    bool ok = true;
    const double lv = logs_value(c.logs, x, ok);
    if (!ok) return -kInf;
    return lv + c.linear.dot(x) + c.constant;
}

double LogAffineProgram::interior_margin(const Vec& x) const {
    double margin = kInf;
    for (const LogTerm& t : objective_logs) {
        margin = std::min(margin, t.a.dot(x) + t.offset);
    }
    for (int j = 0; j < static_cast<int>(constraints.size()); ++j) {
        for (const LogTerm& t : constraints[j].logs) {
            margin = std::min(margin, t.a.dot(x) + t.offset);
        }
        margin = std::min(margin, constraint_value(j, x));
    }
    for (int i = 0; i < lin_b.size(); ++i) {
        margin = std::min(margin, lin_b(i) - lin_a.row(i).dot(x));
    }
    for (int k = 0; k < num_vars; ++k) margin = std::min(margin, x(k) - lower(k));
    return margin;
}

namespace {

struct BarrierEval {
    double value = kInf;
    bool in_domain = false;
};

// f0(x) - mu * sum of logs of every inequality slack.
BarrierEval barrier_value(const LogAffineProgram& p, const Vec& x, double mu) {
    BarrierEval ev;
    bool ok = true;
    double v = logs_value(p.objective_logs, x, ok);
    if (!ok) return ev;
    v += p.objective_linear.dot(x) + p.objective_constant;
    for (int j = 0; j < static_cast<int>(p.constraints.size()); ++j) {
        const double c = p.constraint_value(j, x);
        if (!(c > 0.0) || !std::isfinite(c)) return ev;
        v -= mu * std::log(c);
    }
    for (int i = 0; i < p.lin_b.size(); ++i) {
        const double s = p.lin_b(i) - p.lin_a.row(i).dot(x);
        if (s <= 0.0) return ev;
        v -= mu * std::log(s);
    }
    for (int k = 0; k < p.num_vars; ++k) {
        const double s = x(k) - p.lower(k);
        if (s <= 0.0) return ev;
        v -= mu * std::log(s);
    }
    ev.value = v;
    ev.in_domain = true;
    return ev;
}

void barrier_derivatives(const LogAffineProgram& p, const Vec& x, double mu, Vec& grad,
                         Mat& hess) {
    const int n = p.num_vars;
    grad = p.objective_linear;
    hess = Mat::Zero(n, n);
    logs_gradient(p.objective_logs, x, grad);
    logs_hessian(p.objective_logs, x, hess);

    Vec cg(n);
    for (const auto& c : p.constraints) {
        const double cv = [&] {
            bool ok = true;
            const double lv = logs_value(c.logs, x, ok);
            return lv + c.linear.dot(x) + c.constant;
        }();
        cg = c.linear;
        logs_gradient(c.logs, x, cg);
        grad.noalias() -= (mu / cv) * cg;
        hess.noalias() += (mu / (cv * cv)) * (cg * cg.transpose());
        // -mu/c * hess(c); hess(c) = -sum w a a^T / s^2, so this adds PSD mass.
        for (const LogTerm& t : c.logs) {
            const double s = t.a.dot(x) + t.offset;
            hess.noalias() += (mu / cv) * (t.weight / (s * s)) * (t.a * t.a.transpose());
        }
    }
    for (int i = 0; i < p.lin_b.size(); ++i) {
        const double s = p.lin_b(i) - p.lin_a.row(i).dot(x);
        const Vec a = p.lin_a.row(i).transpose();
        grad.noalias() += (mu / s) * a;
        hess.noalias() += (mu / (s * s)) * (a * a.transpose());
    }
    for (int k = 0; k < n; ++k) {
        const double s = x(k) - p.lower(k);
        grad(k) -= mu / s;
        hess(k, k) += mu / (s * s);
    }
}

}  // namespace

ConvexSolution convex_solve(const LogAffineProgram& prog, const Vec& x0,
                            const BarrierOptions& opts) {
    prog.validate();
    ConvexSolution sol;
    if (x0.size() != prog.num_vars) {
        throw std::invalid_argument("convex_solve: start point has wrong dimension");
    }
    if (!(prog.interior_margin(x0) > 0.0)) {
        sol.status = ConvexStatus::StartPointNotInterior;
        sol.x = x0;
        return sol;
    }

    const int m = prog.num_inequalities();
    Vec x = x0;
    double mu = opts.mu_initial;
    Vec grad;
    Mat hess;

    while (true) {
        // Center for the current mu with damped Newton. The decrement bounds
        // the remaining function gap; the gradient norm guards stationarity.
        int stalls = 0;
        for (int it = 0; it < opts.max_newton_iters; ++it) {
            barrier_derivatives(prog, x, mu, grad, hess);
            Eigen::LDLT<Mat> ldlt(hess);
            Vec step = -ldlt.solve(grad);
            double descent = grad.dot(step);
            if (ldlt.info() != Eigen::Success || !std::isfinite(descent) || descent >= 0.0) {
                // Regularize until the direction points downhill.
                double ridge = 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
                for (int tries = 0; tries < 40; ++tries) {
                    Mat reg = hess + ridge * Mat::Identity(prog.num_vars, prog.num_vars);
                    ldlt.compute(reg);
                    step = -ldlt.solve(grad);
                    descent = grad.dot(step);
                    if (ldlt.info() == Eigen::Success && std::isfinite(descent) &&
                        descent < 0.0) {
                        break;
                    }
                    ridge *= 10.0;
                }
                if (!(descent < 0.0)) {
                    sol.status = ConvexStatus::LineSearchFailed;
                    sol.x = x;
                    sol.objective = prog.objective_value(x);
                    return sol;
                }
            }
            const double decrement_sq = -descent;  // lambda^2 for exact Newton steps
            if (0.5 * decrement_sq <= opts.newton_tol && grad.norm() <= opts.grad_tol) break;

            const double base = barrier_value(prog, x, mu).value;
            // Terminal steps shrink the value by less than float resolution;
            // the noise allowance lets the full Newton step through then.
            const double noise = 1e-14 * (1.0 + std::abs(base));
            double t = 1.0;
            bool moved = false;
            double achieved = base;
            for (int bt = 0; bt < opts.max_backtracks; ++bt) {
                const Vec cand = x + t * step;
                const BarrierEval ev = barrier_value(prog, cand, mu);
                if (ev.in_domain && ev.value <= base + opts.armijo * t * descent + noise) {
                    x = cand;
                    moved = true;
                    achieved = ev.value;
                    break;
                }
                t *= opts.backtrack_shrink;
            }
            ++sol.newton_iterations;
            if (!moved) {
                if (0.5 * decrement_sq <= 1e-9) break;  // at the numeric floor
                sol.status = ConvexStatus::LineSearchFailed;
                sol.x = x;
                sol.objective = prog.objective_value(x);
                return sol;
            }
            // Centered to machine precision: the value no longer moves.
            if (std::abs(base - achieved) <= 1e-15 * (1.0 + std::abs(base))) {
                if (++stalls >= 4) break;
            } else {
                stalls = 0;
            }
        }
        if (mu * m <= opts.mu_floor_times_m) break;
        mu *= opts.mu_shrink;
    }

    // Barrier multipliers mu / slack for every inequality.
    const int n_con = static_cast<int>(prog.constraints.size());
    const int n_lin = static_cast<int>(prog.lin_b.size());
    sol.multipliers = Vec::Zero(m);
    for (int j = 0; j < n_con; ++j) sol.multipliers(j) = mu / prog.constraint_value(j, x);
    for (int i = 0; i < n_lin; ++i) {
        sol.multipliers(n_con + i) = mu / (prog.lin_b(i) - prog.lin_a.row(i).dot(x));
    }
    for (int k = 0; k < prog.num_vars; ++k) {
        sol.multipliers(n_con + n_lin + k) = mu / (x(k) - prog.lower(k));
    }
    sol.status = ConvexStatus::Ok;
    sol.x = x;
    sol.objective = prog.objective_value(x);
    sol.kkt_residual = kkt_residual(prog, x, sol.multipliers);
    return sol;
}

double kkt_residual(const LogAffineProgram& prog, const Vec& x, const Vec& multipliers) {
    const int n_con = static_cast<int>(prog.constraints.size());
    const int n_lin = static_cast<int>(prog.lin_b.size());
    if (multipliers.size() != prog.num_inequalities()) {
        throw std::invalid_argument("kkt_residual: multiplier count mismatch");
    }
    Vec stat = prog.objective_gradient(x);
    double comp = 0.0;
    Vec cg(prog.num_vars);
    for (int j = 0; j < n_con; ++j) {
        const auto& c = prog.constraints[j];
        cg = c.linear;
        logs_gradient(c.logs, x, cg);
        stat.noalias() -= multipliers(j) * cg;
        comp += std::abs(multipliers(j) * prog.constraint_value(j, x));
    }
    for (int i = 0; i < n_lin; ++i) {
        const Vec a = prog.lin_a.row(i).transpose();
        stat.noalias() += multipliers(n_con + i) * a;
        comp += std::abs(multipliers(n_con + i) * (prog.lin_b(i) - a.dot(x)));
    }
    for (int k = 0; k < prog.num_vars; ++k) {
        stat(k) -= multipliers(n_con + n_lin + k);
        comp += std::abs(multipliers(n_con + n_lin + k) * (x(k) - prog.lower(k)));
    }
    return stat.norm() + comp;
}

}  // namespace noma::solver
