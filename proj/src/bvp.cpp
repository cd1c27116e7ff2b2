#include "hjbqrnet/bvp.hpp"

#include "hjbqrnet/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjbqrnet {

namespace {

struct Grid {
    Vector times;
    std::vector<Vector> xs;
    std::vector<Vector> ls;

    Eigen::Index nodes() const { return times.size(); }
};

// Shared per-solve machinery: the Hamiltonian-minimizing control and the
// state/costate right-hand sides F = f(x, u*), G = H_x(x, lambda, u*).
class PmpOps {
public:
    PmpOps(const ControlProblem& p, const RiccatiSolution& riccati)
        : p_(p),
          riccati_(riccati),
          r_lu_(p.control_cost()),
          constant_fu_(p.constant_control_jacobian()) {
        if (!p.control_affine())
            throw UnsupportedProblemError("solve_pmp: requires control-affine dynamics");
        if (constant_fu_) {
            fu_goal_ = p.dynamics_jac_control(p.goal_state(), p.goal_control());
            half_rinv_fut_ = 0.5 * r_lu_.solve(Matrix(fu_goal_.transpose()));
        }
    }

    const ControlProblem& problem() const { return p_; }
    const RiccatiSolution& riccati() const { return riccati_; }

    Vector control(const Vector& x, const Vector& lambda) const {
        Vector u;
        if (constant_fu_) {
            u = p_.goal_control() - half_rinv_fut_ * lambda;
        } else {
            Matrix fu = p_.dynamics_jac_control(x, p_.goal_control());
            u = p_.goal_control() - 0.5 * r_lu_.solve(Vector(fu.transpose() * lambda));
        }
        return clamp_control(p_, u);
    }

    void rhs(const Vector& x, const Vector& lambda, Vector& f, Vector& g) const {
        Vector u = control(x, lambda);
        f = p_.dynamics(x, u);
        g = p_.state_cost_gradient(x) + p_.dynamics_jac_state(x, u).transpose() * lambda;
    }

    // 2n x 2n Jacobian of (F, G) with respect to (x, lambda) at one node.
    Matrix node_jacobian(const Vector& x, const Vector& lambda) const {
        const Eigen::Index n = p_.state_dim();
        Matrix block(2 * n, 2 * n);
        if (constant_fu_) {
            Vector u = control(x, lambda);
            Matrix dudl = -half_rinv_fut_;
            for (Eigen::Index i = 0; i < u.size(); ++i)
                if (u(i) <= p_.control_lower()(i) || u(i) >= p_.control_upper()(i))
                    dudl.row(i).setZero();
            Matrix fx = p_.dynamics_jac_state(x, u);
            block.topLeftCorner(n, n) = fx;
            block.topRightCorner(n, n) = fu_goal_ * dudl;
            block.bottomLeftCorner(n, n) =
                p_.state_cost_hessian_at(x) + p_.dynamics_hessian_costate(x, u, lambda);
            block.bottomRightCorner(n, n) = fx.transpose();
        } else {
            // finite-difference fallback for state-dependent f_u
            Vector fp, gp, fm, gm;
            for (Eigen::Index c = 0; c < 2 * n; ++c) {
                Vector xp = x, xm = x, lp = lambda, lm = lambda;
                double base = c < n ? x(c) : lambda(c - n);
                double step = 1e-7 * (1.0 + std::fabs(base));
                if (c < n) {
                    xp(c) += step;
                    xm(c) -= step;
                } else {
                    lp(c - n) += step;
                    lm(c - n) -= step;
                }
                rhs(xp, lp, fp, gp);
                rhs(xm, lm, fm, gm);
                block.col(c).head(n) = (fp - fm) / (2.0 * step);
                block.col(c).tail(n) = (gp - gm) / (2.0 * step);
            }
        }
        return block;
    }

private:
    const ControlProblem& p_;
    const RiccatiSolution& riccati_;
    LuFactorization r_lu_;
    bool constant_fu_;
    Matrix fu_goal_;
    Matrix half_rinv_fut_;
};

struct ResidualEval {
    Vector defect;  // stacked: n BC rows, 2n per interval, n terminal rows
    std::vector<Vector> fs, gs;
    double max_defect = 0.0;
};

ResidualEval evaluate_residual(const PmpOps& ops, const Grid& grid, const Vector& x0) {
    const Eigen::Index n = x0.size();
    const Eigen::Index nodes = grid.nodes();
    const Eigen::Index intervals = nodes - 1;
    ResidualEval ev;
    ev.fs.resize(nodes);
    ev.gs.resize(nodes);
    for (Eigen::Index k = 0; k < nodes; ++k)
        ops.rhs(grid.xs[k], grid.ls[k], ev.fs[k], ev.gs[k]);

    ev.defect.resize(2 * n * nodes);
    ev.defect.head(n) = grid.xs[0] - x0;
    for (Eigen::Index k = 0; k < intervals; ++k) {
        double h = grid.times(k + 1) - grid.times(k);
        Eigen::Index row = n + 2 * n * k;
        ev.defect.segment(row, n) =
            grid.xs[k + 1] - grid.xs[k] - 0.5 * h * (ev.fs[k] + ev.fs[k + 1]);
        ev.defect.segment(row + n, n) =
            grid.ls[k + 1] - grid.ls[k] + 0.5 * h * (ev.gs[k] + ev.gs[k + 1]);
    }
    ev.defect.tail(n) = grid.ls[nodes - 1];
    ev.max_defect = inf_norm(ev.defect);
    return ev;
}

// Assembles and solves the banded Newton system J dz = -defect.
Vector newton_direction(const PmpOps& ops, const Grid& grid, const ResidualEval& ev) {
    const Eigen::Index n = ops.problem().state_dim();
    const Eigen::Index nodes = grid.nodes();
    const Eigen::Index intervals = nodes - 1;
    const Eigen::Index dim = 2 * n * nodes;
    const Eigen::Index band = 3 * n - 1;

    BandedLu system(dim, band, band);
    for (Eigen::Index i = 0; i < n; ++i) system.at(i, i) = 1.0;  // x(0) = x0
    Eigen::Index last = 2 * n * intervals;
    for (Eigen::Index i = 0; i < n; ++i)
        system.at(n + 2 * n * intervals + i, last + n + i) = 1.0;  // lambda(T) = 0

    std::vector<Matrix> blocks(nodes);
    for (Eigen::Index k = 0; k < nodes; ++k)
        blocks[k] = ops.node_jacobian(grid.xs[k], grid.ls[k]);

    for (Eigen::Index k = 0; k < intervals; ++k) {
        double h = grid.times(k + 1) - grid.times(k);
        Eigen::Index row0 = n + 2 * n * k;
        Eigen::Index colk = 2 * n * k;
        Eigen::Index colk1 = 2 * n * (k + 1);
        const Matrix& bk = blocks[k];
        const Matrix& bk1 = blocks[k + 1];
        for (Eigen::Index i = 0; i < n; ++i) {
            // state defect rows
            for (Eigen::Index c = 0; c < 2 * n; ++c) {
                double jk = -0.5 * h * bk(i, c);
                double jk1 = -0.5 * h * bk1(i, c);
                if (c == i) {
                    jk -= 1.0;
                    jk1 += 1.0;
                }
                if (jk != 0.0) system.at(row0 + i, colk + c) += jk;
                if (jk1 != 0.0) system.at(row0 + i, colk1 + c) += jk1;
            }
            // costate defect rows
            for (Eigen::Index c = 0; c < 2 * n; ++c) {
                double jk = 0.5 * h * bk(n + i, c);
                double jk1 = 0.5 * h * bk1(n + i, c);
                if (c == n + i) {
                    jk -= 1.0;
                    jk1 += 1.0;
                }
                if (jk != 0.0) system.at(row0 + n + i, colk + c) += jk;
                if (jk1 != 0.0) system.at(row0 + n + i, colk1 + c) += jk1;
            }
        }
    }
    system.factorize();
    return system.solve(-ev.defect);
}

void apply_step(Grid& grid, const Vector& dz, double alpha) {
    const Eigen::Index n = grid.xs[0].size();
    for (Eigen::Index k = 0; k < grid.nodes(); ++k) {
        grid.xs[k] += alpha * dz.segment(2 * n * k, n);
        grid.ls[k] += alpha * dz.segment(2 * n * k + n, n);
    }
}

struct NewtonOutcome {
    bool converged = false;
    double defect = 0.0;
    int iterations = 0;
};

NewtonOutcome newton_solve(const PmpOps& ops, Grid& grid, const Vector& x0,
                           const BvpConfig& config) {
    NewtonOutcome out;
    ResidualEval ev = evaluate_residual(ops, grid, x0);
    for (int iter = 0; iter < config.max_newton_iter; ++iter) {
        if (ev.max_defect <= config.newton_tol) {
            out.converged = true;
            out.defect = ev.max_defect;
            out.iterations = iter;
            return out;
        }
        Vector dz;
        try {
            dz = newton_direction(ops, grid, ev);
        } catch (const SingularMatrixError&) {
            break;
        }
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= config.damping_min) {
            Grid trial = grid;
            apply_step(trial, dz, alpha);
            ResidualEval trial_ev = evaluate_residual(ops, trial, x0);
            if (std::isfinite(trial_ev.max_defect) &&
                (trial_ev.max_defect < (1.0 - 1e-4 * alpha) * ev.max_defect ||
                 trial_ev.max_defect <= config.newton_tol)) {
                grid = std::move(trial);
                ev = std::move(trial_ev);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    out.converged = ev.max_defect <= config.newton_tol;
    out.defect = ev.max_defect;
    return out;
}

// Integrates the LQR closed loop from `from` across [t0, t1] and appends
// nodes (skipping the first) to the grid arrays.
void extend_with_lqr(const PmpOps& ops, Vector state, double t0, double t1,
                     Eigen::Index intervals, double divergence_cap,
                     std::vector<double>& times, std::vector<Vector>& xs,
                     std::vector<Vector>& ls) {
    const ControlProblem& p = ops.problem();
    const RiccatiSolution& riccati = ops.riccati();
    OdeRhs rhs = [&](double, const Vector& x) {
        return p.dynamics(x, clamp_control(p, riccati.control(x)));
    };
    Dopri5Options opts;
    opts.rel_tol = 1e-6;
    opts.abs_tol = 1e-9;
    double h = (t1 - t0) / intervals;
    for (Eigen::Index k = 0; k < intervals; ++k) {
        double ta = t0 + k * h;
        Dopri5Result step = integrate_dopri5(rhs, ta, state, ta + h, opts);
        if (step.status == OdeStatus::step_underflow)
            throw NumericalError("lqr_warm_start: integrator step underflow");
        state = step.x_final;
        if (!state.allFinite() || state.norm() > divergence_cap)
            throw NumericalError("lqr_warm_start: closed-loop simulation diverged");
        times.push_back(ta + h);
        xs.push_back(state);
        ls.push_back(riccati.value_gradient(state));
    }
}

Grid interpolate_guess(const Grid& src, const Vector& new_times) {
    Grid out;
    out.times = new_times;
    const Eigen::Index nodes = new_times.size();
    out.xs.resize(nodes);
    out.ls.resize(nodes);
    for (Eigen::Index k = 0; k < nodes; ++k) {
        double t = new_times(k);
        // locate the bracketing source interval
        Eigen::Index j = std::upper_bound(src.times.data(), src.times.data() + src.times.size(),
                                          t) -
                         src.times.data();
        if (j <= 0) {
            out.xs[k] = src.xs.front();
            out.ls[k] = src.ls.front();
        } else if (j >= src.times.size()) {
            out.xs[k] = src.xs.back();
            out.ls[k] = src.ls.back();
        } else {
            double t0 = src.times(j - 1), t1 = src.times(j);
            double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
            out.xs[k] = (1.0 - w) * src.xs[j - 1] + w * src.xs[j];
            out.ls[k] = (1.0 - w) * src.ls[j - 1] + w * src.ls[j];
        }
    }
    return out;
}

double hamiltonian_max_over(const PmpOps& ops, const Grid& grid) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.nodes(); ++k) {
        Vector u = ops.control(grid.xs[k], grid.ls[k]);
        worst = std::max(worst,
                         std::fabs(hamiltonian(ops.problem(), grid.xs[k], grid.ls[k], u)));
    }
    return worst;
}

void validate_config(const BvpConfig& config) {
    if (config.horizon_ladder.empty())
        throw ConfigError("bvp: horizon ladder must be nonempty");
    double prev = 0.0;
    for (double t : config.horizon_ladder) {
        if (t <= prev) throw ConfigError("bvp: horizon ladder must be strictly increasing");
        prev = t;
    }
    if (config.nodes_per_unit < 1) throw ConfigError("bvp: nodes_per_unit must be >= 1");
    if (config.newton_tol <= 0 || config.terminal_costate_tol <= 0 ||
        config.terminal_state_tol <= 0 || config.hamiltonian_tol <= 0)
        throw ConfigError("bvp: tolerances must be positive");
}

}  // namespace

WarmStart lqr_warm_start(const ControlProblem& problem, const RiccatiSolution& riccati,
                         const Vector& x0, double t_f, int intervals, double divergence_cap) {
    check_vector(x0, problem.state_dim(), "lqr_warm_start x0");
    if (t_f <= 0.0 || intervals < 1) throw ConfigError("lqr_warm_start: bad horizon/mesh");
    PmpOps ops(problem, riccati);

    std::vector<double> times{0.0};
    std::vector<Vector> xs{x0};
    std::vector<Vector> ls{riccati.value_gradient(x0)};
    extend_with_lqr(ops, x0, 0.0, t_f, intervals, divergence_cap, times, xs, ls);

    WarmStart ws;
    ws.times = Eigen::Map<const Vector>(times.data(), static_cast<Eigen::Index>(times.size()));
    ws.states = std::move(xs);
    ws.costates = std::move(ls);
    ws.controls.reserve(ws.states.size());
    double cost = riccati.value(ws.states.back());
    for (std::size_t k = 0; k < ws.states.size(); ++k)
        ws.controls.push_back(clamp_control(problem, riccati.control(ws.states[k])));
    for (std::size_t k = 0; k + 1 < ws.states.size(); ++k) {
        double h = ws.times(k + 1) - ws.times(k);
        cost += 0.5 * h *
                (running_cost(problem, ws.states[k], ws.controls[k]) +
                 running_cost(problem, ws.states[k + 1], ws.controls[k + 1]));
    }
    ws.lqr_cost = cost;
    return ws;
}

OpenLoopSolution solve_pmp(const ControlProblem& problem, const RiccatiSolution& riccati,
                           const Vector& x0, const BvpConfig& config) {
    validate_config(config);
    check_vector(x0, problem.state_dim(), "solve_pmp x0");
    PmpOps ops(problem, riccati);

    OpenLoopSolution sol;
    Grid best;
    double best_t = 0.0;
    double best_defect = 0.0;
    bool have_best = false;
    bool accepted = false;
    double lqr_cost = std::numeric_limits<double>::quiet_NaN();
    int density_multiplier = 1;
    bool mesh_exhausted = false;

    for (double horizon : config.horizon_ladder) {
        Eigen::Index base_intervals = std::max<Eigen::Index>(
            4, static_cast<Eigen::Index>(std::ceil(horizon * config.nodes_per_unit)));
        bool rung_done = false;
        for (int attempt = 0; attempt <= config.max_mesh_doublings && !rung_done; ++attempt) {
            Eigen::Index intervals = base_intervals * density_multiplier;
            if ((intervals + 1) > config.max_total_nodes)
                throw ResourceError("solve_pmp: mesh growth exceeds max_total_nodes");

            Grid guess;
            Vector new_times = Vector::LinSpaced(intervals + 1, 0.0, horizon);
            try {
                if (have_best) {
                    // reuse the converged shorter-horizon solution, then march
                    // the LQR closed loop over the extension
                    guess = interpolate_guess(best, new_times);
                    Eigen::Index first_new = 0;
                    while (first_new < new_times.size() && new_times(first_new) <= best_t)
                        ++first_new;
                    if (first_new < new_times.size()) {
                        std::vector<double> times;
                        std::vector<Vector> xs, ls;
                        Vector from = best.xs.back();
                        double h = horizon / intervals;
                        Eigen::Index ext = new_times.size() - first_new;
                        extend_with_lqr(ops, from, best_t, best_t + ext * h, ext,
                                        config.divergence_cap, times, xs, ls);
                        for (Eigen::Index j = 0; j < ext; ++j) {
                            guess.xs[first_new + j] = xs[j];
                            guess.ls[first_new + j] = ls[j];
                        }
                    }
                } else {
                    WarmStart ws = lqr_warm_start(problem, riccati, x0, horizon,
                                                  static_cast<int>(intervals),
                                                  config.divergence_cap);
                    guess.times = new_times;
                    guess.xs = std::move(ws.states);
                    guess.ls = std::move(ws.costates);
                    if (std::isnan(lqr_cost)) lqr_cost = ws.lqr_cost;
                }
            } catch (const NumericalError& e) {
                sol.warning = e.what();
                break;  // warm start failed at this rung; try a longer horizon
            }

            NewtonOutcome outcome = newton_solve(ops, guess, x0, config);
            if (!outcome.converged) {
                density_multiplier *= 2;
                continue;
            }
            double h_max = hamiltonian_max_over(ops, guess);
            if (h_max > config.hamiltonian_tol) {
                if (attempt == config.max_mesh_doublings) {
                    mesh_exhausted = true;
                    sol.warning = "hamiltonian tolerance unreachable at mesh cap";
                }
                density_multiplier *= 2;
                continue;
            }
            best = std::move(guess);
            best_t = horizon;
            best_defect = outcome.defect;
            have_best = true;
            rung_done = true;
        }
        if (mesh_exhausted) break;
        if (!rung_done) continue;

        double terminal_costate = best.ls.back().norm();
        double terminal_state = (best.xs.back() - problem.goal_state()).norm();
        if (terminal_costate <= config.terminal_costate_tol &&
            terminal_state <= config.terminal_state_tol) {
            accepted = true;
            break;
        }
    }

    if (!have_best) {
        sol.converged = false;
        if (sol.warning.empty()) sol.warning = "no ladder rung converged";
        return sol;
    }

    const Eigen::Index nodes = best.nodes();
    sol.times = best.times;
    sol.states = best.xs;
    sol.costates = best.ls;
    sol.controls.resize(nodes);
    for (Eigen::Index k = 0; k < nodes; ++k)
        sol.controls[k] = ops.control(best.xs[k], best.ls[k]);
    sol.residual = best_defect;
    sol.converged = accepted;
    if (!accepted && sol.warning.empty())
        sol.warning = "ladder exhausted before terminal tolerances were met";

    // Value-to-go: derivative-corrected trapezoid plus the LQR tail. The
    // correction uses dL/dt assembled from the state/costate equations,
    // treating f_u as constant in x (exact for the problems shipped here).
    sol.values.resize(nodes);
    Vector l_vals(nodes);
    Vector l_dots(nodes);
    Matrix fu = problem.dynamics_jac_control(problem.goal_state(), problem.goal_control());
    LuFactorization r_lu(problem.control_cost());
    for (Eigen::Index k = 0; k < nodes; ++k) {
        const Vector& x = sol.states[k];
        const Vector& lam = sol.costates[k];
        const Vector& u = sol.controls[k];
        l_vals(k) = running_cost(problem, x, u);
        Vector f, g;
        ops.rhs(x, lam, f, g);
        Vector lambda_dot = -g;
        Vector udot = -0.5 * r_lu.solve(Vector(fu.transpose() * lambda_dot));
        for (Eigen::Index i = 0; i < udot.size(); ++i)
            if (u(i) <= problem.control_lower()(i) || u(i) >= problem.control_upper()(i))
                udot(i) = 0.0;
        Vector du = u - problem.goal_control();
        l_dots(k) = problem.state_cost_gradient(x).dot(f) +
                    2.0 * du.dot(problem.control_cost() * udot);
    }
    sol.values(nodes - 1) = riccati.value(sol.states[nodes - 1]);
    for (Eigen::Index k = nodes - 2; k >= 0; --k) {
        double h = sol.times(k + 1) - sol.times(k);
        double piece = 0.5 * h * (l_vals(k) + l_vals(k + 1)) +
                       h * h / 12.0 * (l_dots(k) - l_dots(k + 1));
        sol.values(k) = sol.values(k + 1) + std::max(piece, 0.0);
    }

    sol.hamiltonian_max = 0.0;
    for (Eigen::Index k = 0; k < nodes; ++k)
        sol.hamiltonian_max = std::max(
            sol.hamiltonian_max,
            std::fabs(hamiltonian(problem, sol.states[k], sol.costates[k], sol.controls[k])));

    if (!std::isnan(lqr_cost) && sol.values(0) > lqr_cost * (1.0 + 1e-6) + 1e-12) {
        sol.suspicious = true;
        if (sol.warning.empty())
            sol.warning = "open-loop value exceeds the LQR closed-loop cost estimate";
    }
    return sol;
}

double costate_residual(const ControlProblem& problem, const OpenLoopSolution& sol) {
    if (sol.node_count() < 2) return 0.0;
    double worst = 0.0;
    Vector g_prev, g_next;
    for (Eigen::Index k = 0; k + 1 < sol.node_count(); ++k) {
        g_prev = hamiltonian_state_gradient(problem, sol.states[k], sol.costates[k],
                                            sol.controls[k]);
        g_next = hamiltonian_state_gradient(problem, sol.states[k + 1], sol.costates[k + 1],
                                            sol.controls[k + 1]);
        double h = sol.times(k + 1) - sol.times(k);
        Vector defect = sol.costates[k + 1] - sol.costates[k] + 0.5 * h * (g_prev + g_next);
        worst = std::max(worst, inf_norm(defect));
    }
    return worst;
}

}  // namespace hjbqrnet
