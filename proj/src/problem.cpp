#include "hjbqrnet/problem.hpp"

#include "hjbqrnet/linalg.hpp"

#include <cmath>
#include <limits>

namespace hjbqrnet {

namespace {

bool is_diagonal(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0) return false;
    return true;
}

}  // namespace

bool ControlProblem::bounded_controls() const {
    for (Eigen::Index i = 0; i < control_lower_.size(); ++i)
        if (std::isfinite(control_lower_(i)) || std::isfinite(control_upper_(i))) return true;
    return false;
}

double ControlProblem::state_cost_value(const Vector& x) const {
    Vector dx = x - goal_state_;
    return dx.dot(state_cost_hessian_ * dx);
}

Vector ControlProblem::state_cost_gradient(const Vector& x) const {
    return 2.0 * (state_cost_hessian_ * (x - goal_state_));
}

Matrix ControlProblem::state_cost_hessian_at(const Vector&) const {
    return 2.0 * state_cost_hessian_;
}

Matrix ControlProblem::dynamics_hessian_costate(const Vector& x, const Vector& u,
                                                const Vector& lambda) const {
    const Eigen::Index n = state_dim();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double step = 1e-6 * (1.0 + std::fabs(x(j)));
        Vector xp = x, xm = x;
        xp(j) += step;
        xm(j) -= step;
        out.col(j) = (dynamics_jac_state(xp, u).transpose() * lambda -
                      dynamics_jac_state(xm, u).transpose() * lambda) /
                     (2.0 * step);
    }
    return out;
}

void ControlProblem::set_goal(Vector x_f, Vector u_f) {
    goal_state_ = std::move(x_f);
    goal_control_ = std::move(u_f);
    const double inf = std::numeric_limits<double>::infinity();
    control_lower_ = Vector::Constant(goal_control_.size(), -inf);
    control_upper_ = Vector::Constant(goal_control_.size(), inf);
}

void ControlProblem::set_costs(Matrix q_hessian, Matrix r) {
    state_cost_hessian_ = std::move(q_hessian);
    control_cost_ = std::move(r);
}

void ControlProblem::set_bounds(Vector u_min, Vector u_max) {
    control_lower_ = std::move(u_min);
    control_upper_ = std::move(u_max);
}

void check_problem_invariants(const ControlProblem& p) {
    const Eigen::Index n = p.state_dim();
    const Eigen::Index m = p.control_dim();
    if (n < 1 || m < 1) throw ConfigError("problem: dimensions must be positive");
    if (p.state_cost_hessian().rows() != n || p.state_cost_hessian().cols() != n)
        throw ConfigError("problem: Q must be n x n");
    if (p.control_cost().rows() != m || p.control_cost().cols() != m)
        throw ConfigError("problem: R must be m x m");
    if (p.control_lower().size() != m || p.control_upper().size() != m)
        throw ConfigError("problem: bound vectors must have control dimension");

    Vector residual = p.dynamics(p.goal_state(), p.goal_control());
    if (residual.norm() > 1e-12)
        throw ConfigError("problem: (x_f, u_f) is not an equilibrium, |f| = " +
                          format_g17(residual.norm()));

    SymmetricEigen r_eig = eig_symmetric(p.control_cost());
    if (r_eig.eigenvalues(0) <= 0.0)
        throw ConfigError("problem: R must be positive definite");
    SymmetricEigen q_eig = eig_symmetric(p.state_cost_hessian());
    double q_scale = std::max(1.0, q_eig.eigenvalues.cwiseAbs().maxCoeff());
    if (q_eig.eigenvalues(0) < -1e-12 * q_scale)
        throw ConfigError("problem: Q must be positive semidefinite");

    for (Eigen::Index i = 0; i < m; ++i) {
        double lo = p.control_lower()(i);
        double hi = p.control_upper()(i);
        if (lo >= hi) throw ConfigError("problem: u_min must be below u_max");
        double uf = p.goal_control()(i);
        if ((std::isfinite(lo) && uf <= lo) || (std::isfinite(hi) && uf >= hi))
            throw ConfigError("problem: u_f must lie strictly inside the control box");
    }
}

Vector eval_dynamics(const ControlProblem& p, const Vector& x, const Vector& u) {
    check_vector(x, p.state_dim(), "eval_dynamics state");
    check_vector(u, p.control_dim(), "eval_dynamics control");
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        double span = 1.0 + std::fabs(p.goal_control()(i));
        if (u(i) < p.control_lower()(i) - 1e-9 * span ||
            u(i) > p.control_upper()(i) + 1e-9 * span)
            throw DimensionError("eval_dynamics: control outside admissible box");
    }
    return p.dynamics(x, u);
}

double running_cost(const ControlProblem& p, const Vector& x, const Vector& u) {
    check_vector(x, p.state_dim(), "running_cost state");
    check_vector(u, p.control_dim(), "running_cost control");
    Vector du = u - p.goal_control();
    return p.state_cost_value(x) + du.dot(p.control_cost() * du);
}

double hamiltonian(const ControlProblem& p, const Vector& x, const Vector& lambda,
                   const Vector& u) {
    check_vector(lambda, p.state_dim(), "hamiltonian costate");
    return running_cost(p, x, u) + lambda.dot(p.dynamics(x, u));
}

Vector hamiltonian_state_gradient(const ControlProblem& p, const Vector& x,
                                  const Vector& lambda, const Vector& u) {
    return p.state_cost_gradient(x) + p.dynamics_jac_state(x, u).transpose() * lambda;
}

Vector minimize_hamiltonian(const ControlProblem& p, const Vector& x, const Vector& lambda) {
    check_vector(x, p.state_dim(), "minimize_hamiltonian state");
    check_vector(lambda, p.state_dim(), "minimize_hamiltonian costate");
    if (!p.control_affine())
        throw UnsupportedProblemError(
            "minimize_hamiltonian: closed form requires control-affine dynamics");
    if (p.bounded_controls() && !is_diagonal(p.control_cost()))
        throw UnsupportedProblemError(
            "minimize_hamiltonian: box-constrained minimization requires diagonal R");

    Matrix fu = p.dynamics_jac_control(x, p.goal_control());
    Vector rhs = fu.transpose() * lambda;
    // stationary point of (u-u_f)' R (u-u_f) + lambda' f: 2R(u-u_f) + fu' lambda = 0
    Vector u = p.goal_control() - 0.5 * lu_solve(p.control_cost(), rhs);
    return clamp_control(p, u);
}

Vector clamp_control(const ControlProblem& p, const Vector& u) {
    Vector out = u;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out(i) = std::min(std::max(out(i), p.control_lower()(i)), p.control_upper()(i));
    return out;
}

std::pair<Matrix, Matrix> linearize(const ControlProblem& p) {
    const Vector& xf = p.goal_state();
    const Vector& uf = p.goal_control();
    Matrix a = p.dynamics_jac_state(xf, uf);
    Matrix b = p.dynamics_jac_control(xf, uf);

    // central-difference audit of the analytic Jacobians
    const double hx = 1e-6 * (1.0 + xf.norm());
    Matrix a_fd(p.state_dim(), p.state_dim());
    for (Eigen::Index j = 0; j < p.state_dim(); ++j) {
        Vector xp = xf, xm = xf;
        xp(j) += hx;
        xm(j) -= hx;
        a_fd.col(j) = (p.dynamics(xp, uf) - p.dynamics(xm, uf)) / (2.0 * hx);
    }
    const double hu = 1e-6 * (1.0 + uf.norm());
    Matrix b_fd(p.state_dim(), p.control_dim());
    for (Eigen::Index j = 0; j < p.control_dim(); ++j) {
        Vector up = uf, um = uf;
        up(j) += hu;
        um(j) -= hu;
        b_fd.col(j) = (p.dynamics(xf, up) - p.dynamics(xf, um)) / (2.0 * hu);
    }
    double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
    double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((a - a_fd).cwiseAbs().maxCoeff() > 1e-6 * scale_a ||
        (b - b_fd).cwiseAbs().maxCoeff() > 1e-6 * scale_b)
        throw NumericalError("linearize: analytic Jacobians disagree with finite differences");
    return {a, b};
}

}  // namespace hjbqrnet
