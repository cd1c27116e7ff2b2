#include <doctest.h>

#include "hjbqrnet/burgers.hpp"
#include "hjbqrnet/chebyshev.hpp"
#include "hjbqrnet/linalg.hpp"
#include "hjbqrnet/linear_problem.hpp"

#include <cmath>

using namespace hjbqrnet;

namespace {

// scalar dx/dt = x + u with unit quadratic costs
LinearQuadraticProblem scalar_problem() {
    Matrix one = Matrix::Identity(1, 1);
    return LinearQuadraticProblem(one, one, one, one);
}

class SinProblem : public ControlProblem {
public:
    SinProblem() {
        set_goal(Vector::Zero(1), Vector::Zero(1));
        set_costs(Matrix::Identity(1, 1), Matrix::Identity(1, 1));
        check_problem_invariants(*this);
    }
    Vector dynamics(const Vector& x, const Vector& u) const override {
        Vector f(1);
        f(0) = std::sin(x(0)) + u(0);
        return f;
    }
    Matrix dynamics_jac_state(const Vector& x, const Vector&) const override {
        Matrix j(1, 1);
        j(0, 0) = std::cos(x(0));
        return j;
    }
    Matrix dynamics_jac_control(const Vector&, const Vector&) const override {
        return Matrix::Identity(1, 1);
    }
    std::string signature() const override { return "sin-test"; }
};

Vector random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("chebyshev differentiation matrix, hand values for N=1 and N=2") {
    ChebyshevGrid g1 = chebyshev_diff_matrix(1);
    CHECK(g1.nodes(0) == doctest::Approx(1.0));
    CHECK(g1.nodes(1) == doctest::Approx(-1.0));
    CHECK(g1.diff(0, 0) == doctest::Approx(0.5));
    CHECK(g1.diff(0, 1) == doctest::Approx(-0.5));
    CHECK(g1.diff(1, 0) == doctest::Approx(0.5));
    CHECK(g1.diff(1, 1) == doctest::Approx(-0.5));

    ChebyshevGrid g2 = chebyshev_diff_matrix(2);
    Matrix expected(3, 3);
    expected << 1.5, -2.0, 0.5, 0.5, 0.0, -0.5, -0.5, 2.0, -1.5;
    CHECK((g2.diff - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("chebyshev derivative of constants and quadratics") {
    for (int n : {4, 9, 16}) {
        ChebyshevGrid g = chebyshev_diff_matrix(n);
        Vector ones = Vector::Ones(n + 1);
        CHECK((g.diff * ones).cwiseAbs().maxCoeff() < 1e-10);
        Vector sq = g.nodes.cwiseProduct(g.nodes);
        Vector expected = 2.0 * g.nodes;
        CHECK((g.diff * sq - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("chebyshev spectral accuracy on exp") {
    for (int n : {20, 24, 32}) {
        ChebyshevGrid g = chebyshev_diff_matrix(n);
        Vector f = g.nodes.array().exp();
        CHECK((g.diff * f - f).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("chebyshev rejects degree zero") {
    CHECK_THROWS_AS(chebyshev_diff_matrix(0), ConfigError);
}

TEST_CASE("burgers origin is an equilibrium") {
    BurgersConfig cfg;
    BurgersProblem p(cfg);
    Vector f = eval_dynamics(p, Vector::Zero(p.state_dim()), Vector::Zero(p.control_dim()));
    CHECK(f.norm() <= 1e-12);
}

TEST_CASE("burgers dynamics matches dense term-by-term oracle") {
    BurgersConfig cfg;
    cfg.interior_nodes = 16;
    BurgersProblem p(cfg);
    const int n = 16;
    Rng rng(5);
    Vector x = random_vector(rng, n, -1.0, 1.0);
    Vector u = random_vector(rng, 2, -1.0, 1.0);

    // independent assembly on the full grid with explicit loops
    ChebyshevGrid g = chebyshev_diff_matrix(n + 1);
    const int np = n + 2;
    std::vector<double> xf(np, 0.0);
    for (int i = 0; i < n; ++i) xf[i + 1] = x(i);
    std::vector<double> w(np);
    for (int i = 0; i < np; ++i) w[i] = xf[i] * xf[i];
    std::vector<double> dx(np, 0.0), dxx(np, 0.0), adv(np, 0.0);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            adv[i] += g.diff(i, j) * w[j];
            dx[i] += g.diff(i, j) * xf[j];
        }
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) dxx[i] += g.diff(i, j) * dx[j];

    // actuators: indicator of the interval scaled by the supporting count
    std::vector<std::vector<double>> b(n, std::vector<double>(2, 0.0));
    for (int j = 0; j < 2; ++j) {
        auto [lo, hi] = cfg.actuator_intervals[j];
        int count = 0;
        for (int i = 0; i < n; ++i) {
            double xi = g.nodes(i + 1);
            if (xi >= lo && xi <= hi) ++count;
        }
        REQUIRE(count > 0);
        for (int i = 0; i < n; ++i) {
            double xi = g.nodes(i + 1);
            if (xi >= lo && xi <= hi) b[i][j] = 1.0 / count;
        }
    }

    Vector expected(n);
    for (int i = 0; i < n; ++i) {
        double xi = g.nodes(i + 1);
        double alpha = cfg.reaction_amplitude * (1.0 + std::sin(M_PI * xi));
        double value = -0.5 * adv[i + 1] + cfg.viscosity * dxx[i + 1] +
                       alpha * xf[i + 1] * std::exp(-cfg.reaction_decay * xf[i + 1]);
        for (int j = 0; j < 2; ++j) value += b[i][j] * u(j);
        expected(i) = value;
    }

    Vector got = eval_dynamics(p, x, u);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("burgers jacobians agree with central differences at random points") {
    BurgersConfig cfg;
    cfg.interior_nodes = 12;
    BurgersProblem p(cfg);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        Vector x = random_vector(rng, 12, -1.5, 1.5);
        Vector u = random_vector(rng, 2, -1.0, 1.0);
        Matrix jx = p.dynamics_jac_state(x, u);
        double step = 1e-6 * (1.0 + x.norm());
        for (Eigen::Index j = 0; j < 12; ++j) {
            Vector xp = x, xm = x;
            xp(j) += step;
            xm(j) -= step;
            Vector fd = (p.dynamics(xp, u) - p.dynamics(xm, u)) / (2.0 * step);
            double scale = std::max(1.0, jx.col(j).cwiseAbs().maxCoeff());
            CHECK((jx.col(j) - fd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
        }
    }
}

TEST_CASE("burgers hessian-costate contraction matches finite differences") {
    BurgersConfig cfg;
    cfg.interior_nodes = 10;
    BurgersProblem p(cfg);
    Rng rng(29);
    Vector x = random_vector(rng, 10, -1.0, 1.0);
    Vector u = random_vector(rng, 2, -1.0, 1.0);
    Vector lambda = random_vector(rng, 10, -2.0, 2.0);
    Matrix analytic = p.dynamics_hessian_costate(x, u, lambda);
    Matrix fd = p.ControlProblem::dynamics_hessian_costate(x, u, lambda);
    CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("burgers open loop is unstable at the origin") {
    BurgersConfig cfg;
    for (int n : {16, 32}) {
        cfg.interior_nodes = n;
        BurgersProblem p(cfg);
        auto [a, b] = linearize(p);
        Spectrum s = eig_general(a);
        CHECK(s.max_real_part > 0.0);  // defaults are tuned for instability
        CHECK(b.cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("scalar linear dynamics substitution") {
    LinearQuadraticProblem p = scalar_problem();
    Vector x(1), u(1);
    x << 2.0;
    u << -1.0;
    Vector f = eval_dynamics(p, x, u);
    CHECK(f(0) == doctest::Approx(1.0));
}

TEST_CASE("eval_dynamics rejects bad input") {
    LinearQuadraticProblem p = scalar_problem();
    Vector x(2), u(1);
    x << 1.0, 2.0;
    u << 0.0;
    CHECK_THROWS_AS(eval_dynamics(p, x, u), DimensionError);
    Vector xn(1);
    xn << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eval_dynamics(p, xn, u), DimensionError);
}

TEST_CASE("running cost at equilibrium and by hand") {
    LinearQuadraticProblem p(Matrix::Identity(2, 2), Matrix::Identity(2, 1),
                             Matrix::Identity(2, 2), Matrix::Identity(1, 1));
    CHECK(running_cost(p, Vector::Zero(2), Vector::Zero(1)) == doctest::Approx(0.0));
    Vector x(2), u(1);
    x << 1.0, 0.0;
    u << 2.0;
    CHECK(running_cost(p, x, u) == doctest::Approx(5.0));
}

TEST_CASE("running cost matches brute-force weighted sum on burgers") {
    BurgersConfig cfg;
    cfg.interior_nodes = 8;
    BurgersProblem p(cfg);
    Rng rng(31);
    Vector x = random_vector(rng, 8, -1.0, 1.0);
    Vector u = random_vector(rng, 2, -1.0, 1.0);
    double expected = 0.0;
    for (int i = 0; i < 8; ++i) expected += x(i) * x(i);
    for (int j = 0; j < 2; ++j) expected += u(j) * u(j);
    CHECK(running_cost(p, x, u) == doctest::Approx(expected));
}

TEST_CASE("hamiltonian decomposition and hand value") {
    LinearQuadraticProblem p = scalar_problem();
    Vector x(1), u(1), lam(1);
    x << 1.0;
    u << 1.0;
    lam << 3.0;
    CHECK(hamiltonian(p, x, lam, u) == doctest::Approx(8.0));
    CHECK(hamiltonian(p, x, Vector::Zero(1), u) == doctest::Approx(running_cost(p, x, u)));
    CHECK(hamiltonian(p, Vector::Zero(1), lam, Vector::Zero(1)) == doctest::Approx(0.0));

    // decomposition identity at random points
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        Vector xr(1), ur(1), lr(1);
        xr << rng.uniform(-2.0, 2.0);
        ur << rng.uniform(-2.0, 2.0);
        lr << rng.uniform(-2.0, 2.0);
        double h = hamiltonian(p, xr, lr, ur);
        double parts = running_cost(p, xr, ur) + lr.dot(p.dynamics(xr, ur));
        CHECK(h == doctest::Approx(parts).epsilon(1e-15));
    }
}

TEST_CASE("minimize_hamiltonian closed form and clamping") {
    LinearQuadraticProblem p = scalar_problem();
    Vector x = Vector::Zero(1);
    CHECK(minimize_hamiltonian(p, x, Vector::Zero(1))(0) == doctest::Approx(0.0));

    Vector lam(1);
    lam << 2.0;
    CHECK(minimize_hamiltonian(p, x, lam)(0) == doctest::Approx(-1.0));

    LinearQuadraticProblem bounded = scalar_problem();
    Vector lo(1), hi(1);
    lo << -0.5;
    hi << 10.0;
    bounded.bound_controls(lo, hi);
    CHECK(minimize_hamiltonian(bounded, x, lam)(0) == doctest::Approx(-0.5));
}

TEST_CASE("minimize_hamiltonian beats random feasible controls") {
    BurgersConfig cfg;
    cfg.interior_nodes = 8;
    Vector lo = Vector::Constant(2, -2.0);
    Vector hi = Vector::Constant(2, 2.0);
    cfg.u_min = lo;
    cfg.u_max = hi;
    BurgersProblem p(cfg);
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        Vector x = random_vector(rng, 8, -1.0, 1.0);
        Vector lam = random_vector(rng, 8, -3.0, 3.0);
        Vector u_star = minimize_hamiltonian(p, x, lam);
        double h_star = hamiltonian(p, x, lam, u_star);
        for (int k = 0; k < 10; ++k) {
            Vector u = random_vector(rng, 2, -2.0, 2.0);
            CHECK(h_star <= hamiltonian(p, x, lam, u) + 1e-12);
        }
    }
}

TEST_CASE("linearize known jacobians") {
    LinearQuadraticProblem p = scalar_problem();
    auto [a, b] = linearize(p);
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(b(0, 0) == doctest::Approx(1.0));

    SinProblem sp;
    auto [as, bs] = linearize(sp);
    CHECK(as(0, 0) == doctest::Approx(1.0));
    CHECK(bs(0, 0) == doctest::Approx(1.0));

    BurgersConfig cfg;
    cfg.interior_nodes = 16;
    BurgersProblem bp(cfg);
    CHECK_NOTHROW(linearize(bp));  // validates against finite differences internally
}

TEST_CASE("problem invariant checks reject bad configurations") {
    Matrix one = Matrix::Identity(1, 1);
    // R not positive definite
    CHECK_THROWS_AS(LinearQuadraticProblem(one, one, one, Matrix::Zero(1, 1)), ConfigError);
    // u_f on the bound
    LinearQuadraticProblem p = scalar_problem();
    Vector lo(1), hi(1);
    lo << 0.0;
    hi << 1.0;
    CHECK_THROWS_AS(p.bound_controls(lo, hi), ConfigError);
}
