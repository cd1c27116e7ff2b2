#include <doctest.h>

#include "hjbqrnet/burgers.hpp"
#include "hjbqrnet/linear_problem.hpp"
#include "hjbqrnet/lqr.hpp"

#include <cmath>

using namespace hjbqrnet;

namespace {

Matrix mat1(double v) {
    Matrix m(1, 1);
    m << v;
    return m;
}

}  // namespace

TEST_CASE("scalar riccati has the closed-form root 1+sqrt(2)") {
    RiccatiSolution sol = solve_care(mat1(1.0), mat1(1.0), mat1(1.0), mat1(1.0));
    const double expected = 1.0 + std::sqrt(2.0);
    CHECK(std::fabs(sol.p(0, 0) - expected) < 1e-10);
    CHECK(sol.gain(0, 0) == doctest::Approx(expected));
    CHECK(sol.closed_loop_a(0, 0) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("stable uncontrolled system reduces to the lyapunov equation") {
    RiccatiSolution sol = solve_care(mat1(-1.0), mat1(0.0), mat1(1.0), mat1(1.0));
    CHECK(sol.p(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("unstabilizable pair is rejected") {
    CHECK_THROWS_AS(solve_care(mat1(1.0), mat1(0.0), mat1(1.0), mat1(1.0)), NumericalError);
}

TEST_CASE("burgers riccati satisfies the residual invariant and is stabilizing") {
    BurgersConfig cfg;
    cfg.interior_nodes = 16;
    BurgersProblem p(cfg);
    RiccatiSolution sol = solve_care(p);
    auto [a, b] = linearize(p);
    CHECK(care_residual(a, b, p.state_cost_hessian(), p.control_cost(), sol.p) <=
          1e-8 * frobenius_norm(sol.p));
    CHECK(eig_general(sol.closed_loop_a).max_real_part < 0.0);
    CHECK((sol.p - sol.p.transpose()).cwiseAbs().maxCoeff() == 0.0);  // symmetrized exactly
    SymmetricEigen pe = eig_symmetric(sol.p);
    CHECK(pe.eigenvalues(0) > 0.0);
}

TEST_CASE("riccati monotonicity: enlarging Q never decreases lambda_min(P)") {
    Rng rng(57);
    for (int trial = 0; trial < 4; ++trial) {
        const Eigen::Index n = 4;
        Matrix a(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        Matrix b = Matrix::Identity(n, 2);
        Matrix q = Matrix::Identity(n, n);
        Matrix r = Matrix::Identity(2, 2);
        RiccatiSolution base = solve_care(a, b, q, r);
        RiccatiSolution bigger = solve_care(a, b, q + 0.1 * Matrix::Identity(n, n), r);
        double lmin_base = eig_symmetric(base.p).eigenvalues(0);
        double lmin_big = eig_symmetric(bigger.p).eigenvalues(0);
        CHECK(lmin_big >= lmin_base - 1e-10);
    }
}

TEST_CASE("closed-loop lyapunov decrease on the linearized system") {
    BurgersConfig cfg;
    cfg.interior_nodes = 12;
    BurgersProblem p(cfg);
    RiccatiSolution sol = solve_care(p);
    Matrix decay = p.state_cost_hessian() + sol.gain.transpose() * p.control_cost() * sol.gain;
    double k3 = eig_symmetric(0.5 * (decay + decay.transpose())).eigenvalues(0);
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        Vector dx(12);
        for (int i = 0; i < 12; ++i) dx(i) = rng.uniform(-1.0, 1.0);
        double lhs = 2.0 * dx.dot(sol.p * (sol.closed_loop_a * dx));
        CHECK(lhs <= -k3 * dx.squaredNorm() + 1e-10);
    }
}

TEST_CASE("lqr value and control for the scalar problem") {
    RiccatiSolution sol = solve_care(mat1(1.0), mat1(1.0), mat1(1.0), mat1(1.0));
    sol.goal_state = Vector::Zero(1);
    sol.goal_control = Vector::Zero(1);
    const double p = 1.0 + std::sqrt(2.0);
    Vector x(1);
    x << 2.0;
    CHECK(sol.value(x) == doctest::Approx(4.0 * p));
    CHECK(sol.control(x)(0) == doctest::Approx(-2.0 * p));
    CHECK(sol.value(Vector::Zero(1)) == doctest::Approx(0.0));
    CHECK(sol.control(Vector::Zero(1))(0) == doctest::Approx(0.0));

    // value gradient against finite differences
    double h = 1e-6;
    Vector xp(1), xm(1);
    xp << 2.0 + h;
    xm << 2.0 - h;
    double fd = (sol.value(xp) - sol.value(xm)) / (2.0 * h);
    CHECK(sol.value_gradient(x)(0) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("lyapunov constants for the scalar problem") {
    Matrix one = Matrix::Identity(1, 1);
    LinearQuadraticProblem problem(one, one, one, one);
    RiccatiSolution sol = solve_care(problem);
    LyapunovConstants c = lyapunov_constants(sol, problem, 1.0, 0.5);
    const double p = 1.0 + std::sqrt(2.0);
    CHECK(c.k1 == doctest::Approx(p));
    CHECK(c.k2 == doctest::Approx(p));
    CHECK(c.k3 == doctest::Approx(1.0 + p * p));
    CHECK(c.k4 == doctest::Approx(2.0 * p));
    CHECK(c.lipschitz_u == doctest::Approx(1.0));

    // hand-evaluated delta+ at theta = 0.5, r = 1
    double expected = 0.5 * (1.0 + p * p) / (1.0 * 2.0 * p) * 1.0;
    CHECK(delta_plus(c) == doctest::Approx(expected));
}

TEST_CASE("lyapunov constants identity-matrix degenerate check") {
    LyapunovConstants c;
    c.k1 = c.k2 = 1.0;
    c.k3 = 1.0;
    c.k4 = 2.0;
    c.lipschitz_u = 1.0;
    c.radius = 2.0;
    c.theta = 0.5;
    // delta+ = (0.5*1)/(1*2) * 1 * 2 = 0.5
    CHECK(delta_plus(c) == doctest::Approx(0.5));

    // unit-constant case from the spec of the formula: k4 = 1 gives 1
    c.k4 = 1.0;
    CHECK(delta_plus(c) == doctest::Approx(1.0));
    // linear in r
    c.radius = 4.0;
    CHECK(delta_plus(c) == doctest::Approx(2.0));
}

TEST_CASE("lyapunov constants on burgers are positive and ordered") {
    BurgersConfig cfg;
    cfg.interior_nodes = 16;
    BurgersProblem p(cfg);
    RiccatiSolution sol = solve_care(p);
    LyapunovConstants c = lyapunov_constants(sol, p, 1.2, 0.9);
    CHECK(c.k1 > 0.0);
    CHECK(c.k2 >= c.k1);
    CHECK(c.k3 > 0.0);
    CHECK(c.k4 > 0.0);
    CHECK(c.lipschitz_u > 0.0);
    CHECK(delta_plus(c) > 0.0);
}

TEST_CASE("lyapunov constants reject semidefinite Q") {
    // double integrator with position-only cost: Q is singular but the
    // Riccati solution is still positive definite
    Matrix one = Matrix::Identity(1, 1);
    Matrix a2(2, 2), b2(2, 1), q2(2, 2);
    a2 << 0.0, 1.0, 0.0, 0.0;
    b2 << 0.0, 1.0;
    q2 << 1.0, 0.0, 0.0, 0.0;
    LinearQuadraticProblem degenerate(a2, b2, q2, one);
    RiccatiSolution sol2 = solve_care(degenerate);
    CHECK_THROWS_AS(lyapunov_constants(sol2, degenerate, 1.0, 0.5), UnsupportedProblemError);
}
