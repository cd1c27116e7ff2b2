#ifndef HJBQRNET_LINEAR_PROBLEM_HPP
#define HJBQRNET_LINEAR_PROBLEM_HPP

#include "hjbqrnet/problem.hpp"

namespace hjbqrnet {

/// Linear dynamics with quadratic cost: dx/dt = A (x - x_f) + B (u - u_f).
/// The LQR solution is exact for this problem, which makes it the reference
/// instance for solver cross-checks.
class LinearQuadraticProblem : public ControlProblem {
public:
    LinearQuadraticProblem(Matrix a, Matrix b, Matrix q, Matrix r);
    LinearQuadraticProblem(Matrix a, Matrix b, Matrix q, Matrix r, Vector x_f, Vector u_f);

    Vector dynamics(const Vector& x, const Vector& u) const override;
    Matrix dynamics_jac_state(const Vector& x, const Vector& u) const override;
    Matrix dynamics_jac_control(const Vector& x, const Vector& u) const override;
    bool constant_control_jacobian() const override { return true; }
    Matrix dynamics_hessian_costate(const Vector& x, const Vector& u,
                                    const Vector& lambda) const override;
    std::string signature() const override;

    void bound_controls(Vector u_min, Vector u_max);

    const Matrix& a_matrix() const { return a_; }
    const Matrix& b_matrix() const { return b_; }

private:
    Matrix a_, b_;
};

}  // namespace hjbqrnet

#endif
