#include "hjbqrnet/lqr.hpp"

#include <cmath>

namespace hjbqrnet {

namespace {

Matrix riccati_rhs(const Matrix& a, const Matrix& q, const Matrix& s, const Matrix& p) {
    return q + a.transpose() * p + p * a - p * s * p;
}

bool is_hurwitz(const Matrix& m) { return eig_general(m).hurwitz(); }

}  // namespace

double RiccatiSolution::value(const Vector& x) const {
    Vector dx = x - goal_state;
    return dx.dot(p * dx);
}

Vector RiccatiSolution::value_gradient(const Vector& x) const {
    return 2.0 * (p * (x - goal_state));
}

Vector RiccatiSolution::control(const Vector& x) const {
    return goal_control - gain * (x - goal_state);
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& c) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || c.rows() != n || c.cols() != n)
        throw DimensionError("solve_lyapunov: size mismatch");
    const Eigen::Index nsym = n * (n + 1) / 2;
    auto pack = [n](Eigen::Index i, Eigen::Index j) {
        if (i > j) std::swap(i, j);
        return i * n - i * (i - 1) / 2 + (j - i);
    };
    Matrix system = Matrix::Zero(nsym, nsym);
    Vector rhs(nsym);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigen::Index row = pack(i, j);
            // (A'X + XA)_(ij) = sum_k A(k,i) X(k,j) + X(i,k) A(k,j)
            for (Eigen::Index k = 0; k < n; ++k) {
                system(row, pack(k, j)) += a(k, i);
                system(row, pack(i, k)) += a(k, j);
            }
            rhs(row) = -c(i, j);
        }
    }
    Vector packed = lu_solve(system, rhs);
    Matrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) x(i, j) = x(j, i) = packed(pack(i, j));
    return x;
}

RiccatiSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                           const Matrix& r, const CareOptions& options) {
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
        r.rows() != m || r.cols() != m)
        throw DimensionError("solve_care: size mismatch");

    LuFactorization r_lu(r);
    const Matrix s = b * r_lu.solve(Matrix(b.transpose()));

    // Phase 1: march the differential Riccati equation until the implied
    // gain stabilizes A.
    Matrix p = Matrix::Zero(n, n);
    if (!is_hurwitz(a - s * p)) {
        double t = 0.0;
        const double a_scale = a.cwiseAbs().rowwise().sum().maxCoeff();
        const double s_scale = s.cwiseAbs().rowwise().sum().maxCoeff();
        bool stabilizing = false;
        while (t < options.dre_horizon_cap) {
            double p_scale = p.size() ? p.cwiseAbs().maxCoeff() : 0.0;
            double dt = 0.4 / (1.0 + 2.0 * a_scale + s_scale * p_scale);
            int steps = static_cast<int>(std::ceil(options.check_interval / dt));
            dt = options.check_interval / steps;
            for (int i = 0; i < steps; ++i) {
                Matrix k1 = riccati_rhs(a, q, s, p);
                Matrix k2 = riccati_rhs(a, q, s, p + 0.5 * dt * k1);
                Matrix k3 = riccati_rhs(a, q, s, p + 0.5 * dt * k2);
                Matrix k4 = riccati_rhs(a, q, s, p + dt * k3);
                p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            p = 0.5 * (p + p.transpose());
            t += options.check_interval;
            if (!p.allFinite() || p.cwiseAbs().maxCoeff() > 1e12)
                throw NumericalError(
                    "solve_care: Riccati marching diverged; (A,B) appears unstabilizable");
            if (is_hurwitz(a - s * p)) {
                stabilizing = true;
                break;
            }
        }
        if (!stabilizing)
            throw NumericalError(
                "solve_care: no stabilizing iterate within the horizon cap; "
                "(A,B) appears unstabilizable");
    }

    // Phase 2: Kleinman-Newton refinement. The iteration is monotone from a
    // stabilizing start; treat only a complete lack of progress as failure.
    double best_residual = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int iter = 0; iter < options.newton_cap; ++iter) {
        Matrix gain = r_lu.solve(Matrix(b.transpose() * p));
        Matrix a_cl = a - b * gain;
        Matrix cost = q + gain.transpose() * r * gain;
        Matrix next = solve_lyapunov(a_cl, cost);
        p = 0.5 * (next + next.transpose());
        double res = frobenius_norm(riccati_rhs(a, q, s, p));
        double target = options.residual_tol * std::max(1.0, frobenius_norm(p));
        if (res <= target) break;
        if (res >= 0.99 * best_residual && iter > 0) {
            if (++stagnant >= 5)
                throw NumericalError("solve_care: Newton iteration stagnated at residual " +
                                     format_g17(res));
        } else {
            stagnant = 0;
        }
        best_residual = std::min(best_residual, res);
        if (iter + 1 == options.newton_cap)
            throw NumericalError("solve_care: Newton iteration cap reached");
    }

    RiccatiSolution sol;
    sol.p = p;
    sol.gain = r_lu.solve(Matrix(b.transpose() * p));
    sol.closed_loop_a = a - b * sol.gain;
    sol.goal_state = Vector::Zero(n);
    sol.goal_control = Vector::Zero(m);
    sol.residual = frobenius_norm(riccati_rhs(a, q, s, p));

    if (sol.residual > 1e-8 * frobenius_norm(p))
        throw NumericalError("solve_care: residual invariant violated: " +
                             format_g17(sol.residual));
    SymmetricEigen p_eig = eig_symmetric(p);
    if (p_eig.eigenvalues(0) <= 0.0)
        throw NumericalError("solve_care: P is not positive definite");
    if (!is_hurwitz(sol.closed_loop_a))
        throw NumericalError("solve_care: closed loop matrix is not Hurwitz");
    return sol;
}

RiccatiSolution solve_care(const ControlProblem& problem, const CareOptions& options) {
    auto [a, b] = linearize(problem);
    RiccatiSolution sol =
        solve_care(a, b, problem.state_cost_hessian(), problem.control_cost(), options);
    sol.goal_state = problem.goal_state();
    sol.goal_control = problem.goal_control();
    return sol;
}

LyapunovConstants lyapunov_constants(const RiccatiSolution& sol, const ControlProblem& problem,
                                     double radius, double theta) {
    if (radius <= 0.0) throw ConfigError("lyapunov_constants: radius must be positive");
    if (theta <= 0.0 || theta >= 1.0)
        throw ConfigError("lyapunov_constants: theta must lie in (0, 1)");

    const Matrix& q = problem.state_cost_hessian();
    SymmetricEigen q_eig = eig_symmetric(q);
    if (q_eig.eigenvalues(0) <= 0.0)
        throw UnsupportedProblemError(
            "lyapunov_constants: Q must be positive definite for the quadratic "
            "Lyapunov construction");

    SymmetricEigen p_eig = eig_symmetric(sol.p);
    Matrix decay = q + sol.gain.transpose() * problem.control_cost() * sol.gain;
    SymmetricEigen decay_eig = eig_symmetric(0.5 * (decay + decay.transpose()));

    LyapunovConstants c;
    c.k1 = p_eig.eigenvalues(0);
    c.k2 = p_eig.eigenvalues(p_eig.eigenvalues.size() - 1);
    c.k3 = decay_eig.eigenvalues(0);
    c.k4 = 2.0 * c.k2;
    c.lipschitz_u =
        spectral_norm(problem.dynamics_jac_control(problem.goal_state(), problem.goal_control()));
    c.radius = radius;
    c.theta = theta;
    if (c.k1 <= 0.0 || c.k3 <= 0.0 || c.lipschitz_u <= 0.0)
        throw NumericalError("lyapunov_constants: constants must be positive");
    return c;
}

double delta_plus(const LyapunovConstants& c) {
    return c.theta * c.k3 / (c.lipschitz_u * c.k4) * std::sqrt(c.k1 / c.k2) * c.radius;
}

double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& p) {
    LuFactorization r_lu(r);
    Matrix s = b * r_lu.solve(Matrix(b.transpose()));
    return frobenius_norm(riccati_rhs(a, q, s, p));
}

}  // namespace hjbqrnet
