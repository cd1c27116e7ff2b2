#ifndef HJBQRNET_LQR_HPP
#define HJBQRNET_LQR_HPP

#include "hjbqrnet/linalg.hpp"
#include "hjbqrnet/problem.hpp"

namespace hjbqrnet {

/// Stabilizing solution of Q + A'P + PA - P B R^{-1} B' P = 0 together with
/// the gain K = R^{-1} B' P and the closed-loop matrix A - B K.
struct RiccatiSolution {
    Matrix p;
    Matrix gain;
    Matrix closed_loop_a;
    Vector goal_state;
    Vector goal_control;
    double residual = 0.0;  // Frobenius norm of the Riccati defect

    /// V_LQR(x) = (x - x_f)' P (x - x_f).
    double value(const Vector& x) const;
    /// Gradient 2 P (x - x_f).
    Vector value_gradient(const Vector& x) const;
    /// u_LQR(x) = u_f - K (x - x_f); unclamped affine law.
    Vector control(const Vector& x) const;
};

struct CareOptions {
    double dre_horizon_cap = 200.0;  // stabilizability failure beyond this
    double check_interval = 0.25;    // time between Hurwitz checks
    int newton_cap = 50;
    double residual_tol = 1e-11;     // relative to ||P||_F
};

/// Solves the continuous algebraic Riccati equation: the differential
/// Riccati equation is integrated forward from P = 0 until the implied gain
/// stabilizes A, then Kleinman-Newton refines to full precision (each step
/// solves the packed n(n+1)/2 Lyapunov system by LU).
RiccatiSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                           const Matrix& r, const CareOptions& options = {});

/// Linearizes the problem at its goal pair and solves the CARE with the
/// problem's cost matrices.
RiccatiSolution solve_care(const ControlProblem& problem, const CareOptions& options = {});

/// Solves A' X + X A = -C for symmetric C with A Hurwitz, via the packed
/// linear system. Exposed for the certification cross-checks.
Matrix solve_lyapunov(const Matrix& a, const Matrix& c);

/// Quadratic-Lyapunov constants of W = V_LQR for the linearized
/// optimally-controlled system:
///   k1 |x|^2 <= W <= k2 |x|^2,  dW/dt <= -k3 |x|^2,  |W_x| <= k4 |x|.
struct LyapunovConstants {
    double k1, k2, k3, k4;
    double lipschitz_u;  // Lipschitz constant of f in u (largest singular value of f_u)
    double radius;       // certificate ball radius r
    double theta;        // margin in (0, 1)
};

/// Requires Q positive definite (W = V_LQR is only a strict Lyapunov
/// function in that case).
LyapunovConstants lyapunov_constants(const RiccatiSolution& sol, const ControlProblem& problem,
                                     double radius, double theta);

/// Perturbation threshold: delta+ = theta k3 / (L_u k4) sqrt(k1/k2) r.
double delta_plus(const LyapunovConstants& c);

/// Frobenius norm of the CARE defect for a candidate P.
double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& p);

}  // namespace hjbqrnet

#endif
