#include <doctest.h>

#include "hjbqrnet/linalg.hpp"

#include <algorithm>
#include <complex>

using namespace hjbqrnet;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

}  // namespace

TEST_CASE("lu_solve identity and diagonal") {
    Matrix eye = Matrix::Identity(3, 3);
    Vector b(3);
    b << 1.0, -2.0, 0.5;
    CHECK((lu_solve(eye, b) - b).norm() == doctest::Approx(0.0));

    Matrix d(2, 2);
    d << 2.0, 0.0, 0.0, 4.0;
    Vector rhs(2);
    rhs << 2.0, 8.0;
    Vector x = lu_solve(d, rhs);
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(2.0));
}

TEST_CASE("lu_solve construct-then-solve round trip") {
    Rng rng(42);
    Matrix a = random_matrix(rng, 50, 50) + 5.0 * Matrix::Identity(50, 50);
    Vector x_true = random_matrix(rng, 50, 1);
    Vector b = a * x_true;
    Vector x = lu_solve(a, b);
    CHECK((x - x_true).norm() < 1e-8);
    CHECK(inf_norm(a * x - b) <= 1e-10 * (1.0 + inf_norm(b)));
}

TEST_CASE("lu_solve on pivot-heavy matrices") {
    // no diagonal dominance: partial pivoting must reorder rows constantly
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(rng, 30, 30);
        Vector x_true = random_matrix(rng, 30, 1);
        Vector b = a * x_true;
        Vector x = lu_solve(a, b);
        CHECK(inf_norm(a * x - b) <= 1e-9 * (1.0 + inf_norm(b)));
    }
}

TEST_CASE("banded lu on pivot-heavy matrices") {
    Rng rng(103);
    const Eigen::Index n = 60, kl = 4, ku = 3;
    for (int trial = 0; trial < 10; ++trial) {
        Matrix dense = Matrix::Zero(n, n);
        BandedLu banded(n, kl, ku);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl);
                 j <= std::min(n - 1, i + ku); ++j) {
                double v = rng.uniform(-1.0, 1.0);
                dense(i, j) = v;
                banded.at(i, j) = v;
            }
        banded.factorize();
        Vector x_true = random_matrix(rng, n, 1);
        Vector b = dense * x_true;
        Vector x = banded.solve(b);
        CHECK(inf_norm(dense * x - b) <= 1e-9 * (1.0 + inf_norm(b)));
    }
}

TEST_CASE("lu_solve rejects singular matrices") {
    Matrix a(2, 2);
    a << 1.0, 2.0, 2.0, 4.0;
    Vector b(2);
    b << 1.0, 1.0;
    CHECK_THROWS_AS(lu_solve(a, b), SingularMatrixError);
}

TEST_CASE("banded lu matches dense lu") {
    Rng rng(7);
    const Eigen::Index n = 40, kl = 3, ku = 2;
    Matrix dense = Matrix::Zero(n, n);
    BandedLu banded(n, kl, ku);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl);
             j <= std::min(n - 1, i + ku); ++j) {
            double v = rng.uniform(-1.0, 1.0);
            if (i == j) v += 4.0;
            dense(i, j) = v;
            banded.at(i, j) = v;
        }
    banded.factorize();
    Vector b = random_matrix(rng, n, 1);
    Vector x_banded = banded.solve(b);
    Vector x_dense = lu_solve(dense, b);
    CHECK((x_banded - x_dense).norm() < 1e-10);
}

TEST_CASE("eig_general diagonal") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = -2.0;
    a(2, 2) = 3.0;
    Spectrum s = eig_general(a);
    CHECK(s.max_real_part == doctest::Approx(3.0));
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(s.eigenvalues[0].real() == doctest::Approx(-2.0));
    CHECK(s.eigenvalues[1].real() == doctest::Approx(1.0));
    CHECK(s.eigenvalues[2].real() == doctest::Approx(3.0));
}

TEST_CASE("eig_general rotation gives pure imaginary pair") {
    Matrix a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    Spectrum s = eig_general(a);
    CHECK(s.max_real_part == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(std::abs(s.eigenvalues[0].imag()) == doctest::Approx(1.0));
    CHECK(s.eigenvalues[0].imag() == doctest::Approx(-s.eigenvalues[1].imag()));
}

TEST_CASE("eig_general companion matrix of (x-1)(x-2)") {
    Matrix a(2, 2);
    a << 3.0, -2.0, 1.0, 0.0;
    Spectrum s = eig_general(a);
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(s.eigenvalues[0].real() == doctest::Approx(1.0));
    CHECK(s.eigenvalues[1].real() == doctest::Approx(2.0));
    CHECK(s.max_real_part == doctest::Approx(2.0));
}

TEST_CASE("eig_general trace equals eigenvalue sum on random matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a = random_matrix(rng, 12, 12);
        Spectrum s = eig_general(a);
        std::complex<double> sum = 0.0;
        for (auto& ev : s.eigenvalues) sum += ev;
        double scale = frobenius_norm(a);
        CHECK(std::abs(sum.real() - a.trace()) <= 1e-8 * scale);
        CHECK(std::abs(sum.imag()) <= 1e-8 * scale);
    }
}

TEST_CASE("eig_general validated eigenvectors") {
    Rng rng(3);
    Matrix a = random_matrix(rng, 8, 8);
    EigenPairs pairs = eig_general_with_vectors(a);  // throws if residual too large
    REQUIRE(pairs.values.size() == 8);
    REQUIRE(pairs.vectors.size() == 8);
}

TEST_CASE("eig_symmetric identity and 2x2") {
    SymmetricEigen eye = eig_symmetric(Matrix::Identity(4, 4));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(eye.eigenvalues(i) == doctest::Approx(1.0));

    Matrix a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    SymmetricEigen s = eig_symmetric(a);
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(3.0));
}

TEST_CASE("eig_symmetric reconstruction and orthonormality") {
    Rng rng(19);
    Matrix base = random_matrix(rng, 30, 30);
    Matrix a = 0.5 * (base + base.transpose());
    SymmetricEigen s = eig_symmetric(a);
    const Matrix& v = s.eigenvectors;
    CHECK((v.transpose() * v - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);
    Matrix rebuilt = v * s.eigenvalues.asDiagonal() * v.transpose();
    CHECK(frobenius_norm(rebuilt - a) < 1e-9 * std::max(1.0, frobenius_norm(a)));
    for (Eigen::Index i = 1; i < 30; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i - 1));
}

TEST_CASE("eig_symmetric rejects asymmetric input") {
    Matrix a(2, 2);
    a << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(eig_symmetric(a), DimensionError);
}

TEST_CASE("eig_general on AtA matches eig_symmetric") {
    Rng rng(23);
    Matrix a = random_matrix(rng, 10, 10);
    Matrix ata = a.transpose() * a;
    SymmetricEigen sym = eig_symmetric(ata);
    Spectrum gen = eig_general(ata);
    REQUIRE(static_cast<Eigen::Index>(gen.eigenvalues.size()) == 10);
    std::vector<double> reals;
    for (auto& ev : gen.eigenvalues) {
        CHECK(std::abs(ev.imag()) <= 1e-8 * frobenius_norm(ata));
        reals.push_back(ev.real());
        CHECK(ev.real() >= -1e-8 * frobenius_norm(ata));
    }
    std::sort(reals.begin(), reals.end());
    for (Eigen::Index i = 0; i < 10; ++i)
        CHECK(std::abs(reals[i] - sym.eigenvalues(i)) <= 1e-8 * frobenius_norm(ata));
}

TEST_CASE("spectral norm of a known matrix") {
    Matrix a(2, 2);
    a << 3.0, 0.0, 0.0, -4.0;
    CHECK(spectral_norm(a) == doctest::Approx(4.0));
}
