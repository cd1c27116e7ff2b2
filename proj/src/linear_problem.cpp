#include "hjbqrnet/linear_problem.hpp"

#include <sstream>
#include <utility>

namespace hjbqrnet {

LinearQuadraticProblem::LinearQuadraticProblem(Matrix a, Matrix b, Matrix q, Matrix r)
    : LinearQuadraticProblem(std::move(a), std::move(b), std::move(q), std::move(r),
                             Vector(), Vector()) {}

LinearQuadraticProblem::LinearQuadraticProblem(Matrix a, Matrix b, Matrix q, Matrix r,
                                               Vector x_f, Vector u_f)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols()) throw ConfigError("linear problem: A must be square");
    if (b_.rows() != a_.rows()) throw ConfigError("linear problem: B row count mismatch");
    if (x_f.size() == 0) x_f = Vector::Zero(a_.rows());
    if (u_f.size() == 0) u_f = Vector::Zero(b_.cols());
    if (x_f.size() != a_.rows() || u_f.size() != b_.cols())
        throw ConfigError("linear problem: goal dimension mismatch");
    set_goal(std::move(x_f), std::move(u_f));
    set_costs(std::move(q), std::move(r));
    check_problem_invariants(*this);
}

Vector LinearQuadraticProblem::dynamics(const Vector& x, const Vector& u) const {
    return a_ * (x - goal_state()) + b_ * (u - goal_control());
}

Matrix LinearQuadraticProblem::dynamics_jac_state(const Vector&, const Vector&) const {
    return a_;
}

Matrix LinearQuadraticProblem::dynamics_jac_control(const Vector&, const Vector&) const {
    return b_;
}

Matrix LinearQuadraticProblem::dynamics_hessian_costate(const Vector&, const Vector&,
                                                        const Vector&) const {
    return Matrix::Zero(state_dim(), state_dim());
}

void LinearQuadraticProblem::bound_controls(Vector u_min, Vector u_max) {
    set_bounds(std::move(u_min), std::move(u_max));
    check_problem_invariants(*this);
}

std::string LinearQuadraticProblem::signature() const {
    std::ostringstream os;
    os << "linear;n=" << state_dim() << ";m=" << control_dim() << ";A=";
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
        for (Eigen::Index j = 0; j < a_.cols(); ++j) os << format_g17(a_(i, j)) << ",";
    os << ";B=";
    for (Eigen::Index i = 0; i < b_.rows(); ++i)
        for (Eigen::Index j = 0; j < b_.cols(); ++j) os << format_g17(b_(i, j)) << ",";
    os << ";Q=";
    for (Eigen::Index i = 0; i < state_dim(); ++i)
        for (Eigen::Index j = 0; j < state_dim(); ++j)
            os << format_g17(state_cost_hessian()(i, j)) << ",";
    os << ";R=";
    for (Eigen::Index i = 0; i < control_dim(); ++i)
        for (Eigen::Index j = 0; j < control_dim(); ++j)
            os << format_g17(control_cost()(i, j)) << ",";
    return os.str();
}

}  // namespace hjbqrnet
