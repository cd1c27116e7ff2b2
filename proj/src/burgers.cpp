#include "hjbqrnet/burgers.hpp"

#include <cmath>
#include <sstream>

namespace hjbqrnet {

BurgersProblem::BurgersProblem(const BurgersConfig& config) : config_(config) {
    const int n = config.interior_nodes;
    if (n < 1) throw ConfigError("burgers: interior_nodes must be >= 1");
    if (config.viscosity <= 0.0) throw ConfigError("burgers: viscosity must be positive");
    if (config.reaction_decay <= 0.0) throw ConfigError("burgers: beta must be positive");
    const int m = static_cast<int>(config.actuator_intervals.size());
    if (m < 1) throw ConfigError("burgers: at least one actuator interval required");

    ChebyshevGrid grid = chebyshev_diff_matrix(n + 1);
    interior_xi_ = grid.nodes.segment(1, n);
    d1_ = grid.diff.block(1, 1, n, n);
    Matrix d_sq = grid.diff * grid.diff;
    d2_ = d_sq.block(1, 1, n, n);

    alpha_.resize(n);
    for (int i = 0; i < n; ++i)
        alpha_(i) = config.reaction_amplitude * (1.0 + std::sin(M_PI * interior_xi_(i)));

    b_ = Matrix::Zero(n, m);
    for (int j = 0; j < m; ++j) {
        auto [lo, hi] = config.actuator_intervals[j];
        if (lo >= hi) throw ConfigError("burgers: empty actuator interval");
        int support = 0;
        for (int i = 0; i < n; ++i)
            if (interior_xi_(i) >= lo && interior_xi_(i) <= hi) ++support;
        if (support == 0)
            throw ConfigError("burgers: actuator interval contains no collocation node");
        for (int i = 0; i < n; ++i)
            if (interior_xi_(i) >= lo && interior_xi_(i) <= hi)
                b_(i, j) = 1.0 / support;
    }

    set_goal(Vector::Zero(n), Vector::Zero(m));
    Vector q = config.q_diag.size() ? config.q_diag : Vector::Ones(n);
    Vector r = config.r_diag.size() ? config.r_diag : Vector::Ones(m);
    if (q.size() != n) throw ConfigError("burgers: q_diag must have length n");
    if (r.size() != m) throw ConfigError("burgers: r_diag must have length m");
    set_costs(q.asDiagonal(), r.asDiagonal());
    if (config.u_min.size() || config.u_max.size()) {
        if (config.u_min.size() != m || config.u_max.size() != m)
            throw ConfigError("burgers: bound vectors must have length m");
        set_bounds(config.u_min, config.u_max);
    }
    check_problem_invariants(*this);
}

Vector BurgersProblem::dynamics(const Vector& x, const Vector& u) const {
    Vector advection = d1_ * x.cwiseProduct(x);
    Vector reaction = alpha_.cwiseProduct(x).cwiseProduct((-config_.reaction_decay * x.array()).exp().matrix());
    return -0.5 * advection + config_.viscosity * (d2_ * x) + reaction + b_ * u;
}

Matrix BurgersProblem::dynamics_jac_state(const Vector& x, const Vector&) const {
    const Eigen::Index n = x.size();
    Matrix jac = config_.viscosity * d2_;
    jac.noalias() -= d1_ * x.asDiagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
        double e = std::exp(-config_.reaction_decay * x(i));
        jac(i, i) += alpha_(i) * e * (1.0 - config_.reaction_decay * x(i));
    }
    return jac;
}

Matrix BurgersProblem::dynamics_jac_control(const Vector&, const Vector&) const {
    return b_;
}

Matrix BurgersProblem::dynamics_hessian_costate(const Vector& x, const Vector&,
                                                const Vector& lambda) const {
    // Both second-derivative contributions are diagonal: the advection term
    // gives -delta_jk (D' lambda)_j and the reaction term acts pointwise.
    const double beta = config_.reaction_decay;
    Vector diag = -(d1_.transpose() * lambda);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double r2 = -alpha_(i) * beta * std::exp(-beta * x(i)) * (2.0 - beta * x(i));
        diag(i) += lambda(i) * r2;
    }
    return diag.asDiagonal();
}

std::string BurgersProblem::signature() const {
    std::ostringstream os;
    os << "burgers;n=" << state_dim() << ";m=" << control_dim()
       << ";nu=" << format_g17(config_.viscosity)
       << ";beta=" << format_g17(config_.reaction_decay)
       << ";alpha0=" << format_g17(config_.reaction_amplitude);
    os << ";intervals=";
    for (const auto& [lo, hi] : config_.actuator_intervals)
        os << format_g17(lo) << ":" << format_g17(hi) << ",";
    os << ";q=";
    for (Eigen::Index i = 0; i < state_dim(); ++i)
        os << format_g17(state_cost_hessian()(i, i)) << ",";
    os << ";r=";
    for (Eigen::Index i = 0; i < control_dim(); ++i)
        os << format_g17(control_cost()(i, i)) << ",";
    os << ";umin=";
    for (Eigen::Index i = 0; i < control_dim(); ++i) os << format_g17(control_lower()(i)) << ",";
    os << ";umax=";
    for (Eigen::Index i = 0; i < control_dim(); ++i) os << format_g17(control_upper()(i)) << ",";
    return os.str();
}

}  // namespace hjbqrnet
