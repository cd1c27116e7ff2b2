#ifndef HJBQRNET_BVP_HPP
#define HJBQRNET_BVP_HPP

#include "hjbqrnet/lqr.hpp"
#include "hjbqrnet/problem.hpp"

#include <string>
#include <vector>

namespace hjbqrnet {

/// One converged (or attempted) open-loop solve of the Pontryagin boundary
/// value problem: states, costates, controls, and value-to-go on a time
/// grid. Controls always satisfy u_k = argmin_u H(x_k, lambda_k, u).
struct OpenLoopSolution {
    Vector times;
    std::vector<Vector> states;
    std::vector<Vector> costates;
    std::vector<Vector> controls;
    Vector values;
    bool converged = false;
    double residual = 0.0;         // max collocation defect, inf norm
    double hamiltonian_max = 0.0;  // max |H| over the grid
    bool suspicious = false;       // V(0) above the LQR closed-loop cost
    std::string warning;

    Eigen::Index node_count() const { return times.size(); }
};

struct BvpConfig {
    /// Increasing truncation horizons; each stage is warm-started from the
    /// previous one with the costate re-terminalized.
    std::vector<double> horizon_ladder = {4.0, 8.0, 16.0, 32.0, 64.0};
    int nodes_per_unit = 16;  // uniform mesh density per stage
    int max_mesh_doublings = 4;
    double newton_tol = 1e-9;  // max-norm collocation defect
    int max_newton_iter = 30;
    double terminal_costate_tol = 1e-6;
    double terminal_state_tol = 1e-4;
    double hamiltonian_tol = 1e-4;  // reject stages whose |H| exceeds this
    double divergence_cap = 1e3;
    double damping_min = 1.0 / 1024.0;
    long max_total_nodes = 300000;  // resource guard across refinements
};

/// LQR closed-loop simulation used as the first-stage initial guess:
/// x from integrating dx/dt = f(x, u_LQR(x)), lambda = 2P(x - x_f),
/// u = u_LQR(x). Throws NumericalError if the simulation blows up.
struct WarmStart {
    Vector times;
    std::vector<Vector> states;
    std::vector<Vector> costates;
    std::vector<Vector> controls;
    double lqr_cost = 0.0;  // trapezoidal cost along the guess + LQR tail
};
WarmStart lqr_warm_start(const ControlProblem& problem, const RiccatiSolution& riccati,
                         const Vector& x0, double t_f, int intervals,
                         double divergence_cap = 1e3);

/// Solves the infinite-horizon PMP boundary value problem by trapezoidal
/// collocation with damped Newton, marching the truncation horizon along
/// config.horizon_ladder until the terminal costate and state tolerances
/// hold. Unconverged attempts are returned with converged = false.
OpenLoopSolution solve_pmp(const ControlProblem& problem, const RiccatiSolution& riccati,
                           const Vector& x0, const BvpConfig& config = {});

/// Max over mesh intervals of the trapezoidal defect of the costate
/// equation (inf norm); the data generator uses it for accept/reject.
double costate_residual(const ControlProblem& problem, const OpenLoopSolution& sol);

}  // namespace hjbqrnet

#endif
