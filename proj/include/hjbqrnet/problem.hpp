#ifndef HJBQRNET_PROBLEM_HPP
#define HJBQRNET_PROBLEM_HPP

#include "hjbqrnet/common.hpp"

#include <memory>
#include <string>
#include <utility>

namespace hjbqrnet {

/// Infinite-horizon optimal control problem
///
///   minimize  integral of  q(x - x_f) + (u - u_f)' R (u - u_f)
///   subject to  dx/dt = f(x, u),  u in [u_min, u_max]
///
/// where (x_f, u_f) is an equilibrium of f. Concrete problems implement the
/// vector field and its Jacobians; the state cost defaults to the quadratic
/// form with Hessian-at-goal Q.
class ControlProblem {
public:
    virtual ~ControlProblem() = default;

    Eigen::Index state_dim() const { return goal_state_.size(); }
    Eigen::Index control_dim() const { return goal_control_.size(); }
    const Vector& goal_state() const { return goal_state_; }
    const Vector& goal_control() const { return goal_control_; }
    const Vector& control_lower() const { return control_lower_; }
    const Vector& control_upper() const { return control_upper_; }
    const Matrix& state_cost_hessian() const { return state_cost_hessian_; }
    const Matrix& control_cost() const { return control_cost_; }

    bool bounded_controls() const;

    virtual Vector dynamics(const Vector& x, const Vector& u) const = 0;
    virtual Matrix dynamics_jac_state(const Vector& x, const Vector& u) const = 0;
    virtual Matrix dynamics_jac_control(const Vector& x, const Vector& u) const = 0;

    /// q(x - x_f); quadratic by default.
    virtual double state_cost_value(const Vector& x) const;
    virtual Vector state_cost_gradient(const Vector& x) const;

    /// True when f(x, u) = f0(x) + f_u(x) u, which makes the Hamiltonian
    /// minimizer available in closed form.
    virtual bool control_affine() const { return true; }

    /// True when f_u does not depend on (x, u); enables the analytic
    /// collocation Jacobian in the boundary-value solver.
    virtual bool constant_control_jacobian() const { return false; }

    /// Hessian of q at x; 2Q for the default quadratic cost.
    virtual Matrix state_cost_hessian_at(const Vector& x) const;

    /// sum_i lambda_i * d^2 f_i / dx^2, i.e. d/dx of f_x(x,u)' lambda.
    /// The default central-difference implementation is correct for any
    /// problem; concrete problems may override with the closed form.
    virtual Matrix dynamics_hessian_costate(const Vector& x, const Vector& u,
                                            const Vector& lambda) const;

    /// Canonical parameter string, hashed into dataset/controller files.
    virtual std::string signature() const = 0;

protected:
    void set_goal(Vector x_f, Vector u_f);
    void set_costs(Matrix q_hessian, Matrix r);
    void set_bounds(Vector u_min, Vector u_max);  // defaults to unbounded

    Vector goal_state_, goal_control_;
    Vector control_lower_, control_upper_;
    Matrix state_cost_hessian_, control_cost_;
};

/// Verifies the equilibrium, cost-matrix, and bound invariants; called by
/// concrete problem constructors. Throws ConfigError on violation.
void check_problem_invariants(const ControlProblem& problem);

/// f(x, u) with dimension / finiteness / box checks.
Vector eval_dynamics(const ControlProblem& problem, const Vector& x, const Vector& u);

/// q(x - x_f) + (u - u_f)' R (u - u_f).
double running_cost(const ControlProblem& problem, const Vector& x, const Vector& u);

/// H(x, lambda, u) = L(x, u) + lambda' f(x, u).
double hamiltonian(const ControlProblem& problem, const Vector& x, const Vector& lambda,
                   const Vector& u);

/// d/dx of the Hamiltonian at fixed (lambda, u).
Vector hamiltonian_state_gradient(const ControlProblem& problem, const Vector& x,
                                  const Vector& lambda, const Vector& u);

/// argmin over the control box of H(x, lambda, u). Requires control-affine
/// dynamics; with finite bounds additionally requires diagonal R (the
/// componentwise clamp of the stationary point is then the exact minimizer).
Vector minimize_hamiltonian(const ControlProblem& problem, const Vector& x,
                            const Vector& lambda);

/// Componentwise clamp onto [u_min, u_max].
Vector clamp_control(const ControlProblem& problem, const Vector& u);

/// Jacobians (A, B) of f at the goal pair, validated against central finite
/// differences at relative tolerance 1e-6.
std::pair<Matrix, Matrix> linearize(const ControlProblem& problem);

}  // namespace hjbqrnet

#endif
