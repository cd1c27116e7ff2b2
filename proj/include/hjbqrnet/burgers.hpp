#ifndef HJBQRNET_BURGERS_HPP
#define HJBQRNET_BURGERS_HPP

#include "hjbqrnet/chebyshev.hpp"
#include "hjbqrnet/problem.hpp"

#include <vector>

namespace hjbqrnet {

/// Parameters of the unstable Burgers'-type benchmark. The PDE
///
///   w_t = -(w^2/2)_xi + nu w_xixi + alpha(xi) w e^{-beta w} + actuation
///
/// is collocated on a Chebyshev grid with homogeneous Dirichlet boundaries;
/// the state vector holds the interior node values.
struct BurgersConfig {
    int interior_nodes = 16;
    double viscosity = 0.2;
    double reaction_decay = 0.1;      // beta
    double reaction_amplitude = 1.5;  // alpha0 in alpha(xi) = alpha0 (1 + sin(pi xi))
    std::vector<std::pair<double, double>> actuator_intervals = {{-0.6, -0.2}, {0.2, 0.6}};
    Vector q_diag;  // empty -> ones
    Vector r_diag;  // empty -> ones
    Vector u_min;   // empty -> unbounded
    Vector u_max;
};

class BurgersProblem : public ControlProblem {
public:
    explicit BurgersProblem(const BurgersConfig& config);

    Vector dynamics(const Vector& x, const Vector& u) const override;
    Matrix dynamics_jac_state(const Vector& x, const Vector& u) const override;
    Matrix dynamics_jac_control(const Vector& x, const Vector& u) const override;
    bool constant_control_jacobian() const override { return true; }
    Matrix dynamics_hessian_costate(const Vector& x, const Vector& u,
                                    const Vector& lambda) const override;
    std::string signature() const override;

    const BurgersConfig& config() const { return config_; }
    const Vector& interior_xi() const { return interior_xi_; }
    const Matrix& actuator_matrix() const { return b_; }
    const Vector& reaction_profile() const { return alpha_; }

    /// First-derivative and second-derivative collocation operators
    /// restricted to interior rows and columns (Dirichlet boundary values
    /// are identically zero).
    const Matrix& diff_interior() const { return d1_; }
    const Matrix& diff2_interior() const { return d2_; }

private:
    BurgersConfig config_;
    Vector interior_xi_;
    Vector alpha_;
    Matrix d1_, d2_, b_;
};

}  // namespace hjbqrnet

#endif
