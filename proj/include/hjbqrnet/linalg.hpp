#ifndef HJBQRNET_LINALG_HPP
#define HJBQRNET_LINALG_HPP

#include "hjbqrnet/common.hpp"

#include <complex>
#include <vector>

namespace hjbqrnet {

/// Eigenvalues of a real square matrix.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
    double max_real_part = 0.0;

    bool hurwitz() const { return max_real_part < 0.0; }
};

/// LU factorization with partial pivoting, reusable for several right-hand
/// sides. Throws SingularMatrixError when a pivot is zero to working
/// precision.
class LuFactorization {
public:
    explicit LuFactorization(const Matrix& a);

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;

    Eigen::Index size() const { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<Eigen::Index> pivots_;
};

/// Solves Ax = b by LU with partial pivoting.
Vector lu_solve(const Matrix& a, const Vector& b);

/// Banded LU with partial pivoting (LAPACK gbtrf-style band storage).
/// Used for the block-banded collocation systems; kl/ku are the lower and
/// upper bandwidths of the assembled matrix.
class BandedLu {
public:
    BandedLu(Eigen::Index n, Eigen::Index kl, Eigen::Index ku);

    /// Entry access while assembling; (i, j) must lie inside the band.
    double& at(Eigen::Index i, Eigen::Index j);

    void factorize();
    Vector solve(const Vector& b) const;

    Eigen::Index size() const { return n_; }
    bool in_band(Eigen::Index i, Eigen::Index j) const {
        return j - i <= ku_ && i - j <= kl_;
    }

private:
    Eigen::Index n_, kl_, ku_;
    Matrix store_;  // (2*kl + ku + 1) x n, row kl+ku+i-j holds A(i,j)
    std::vector<Eigen::Index> pivots_;
    bool factored_ = false;
};

/// Eigenvalues of a general real matrix via Householder reduction to
/// Hessenberg form followed by Francis double-shift QR iteration.
Spectrum eig_general(const Matrix& a);

/// Eigenvalues and right eigenvectors. Eigenvectors are recovered by inverse
/// iteration and each pair is validated: ||A v - lambda v|| <= 1e-8 ||A||.
struct EigenPairs {
    std::vector<std::complex<double>> values;
    std::vector<Eigen::VectorXcd> vectors;
};
EigenPairs eig_general_with_vectors(const Matrix& a);

/// Symmetric eigendecomposition (tridiagonalization + implicit QL).
/// Returns eigenvalues in ascending order with orthonormal eigenvectors in
/// matching columns. Rejects matrices with asymmetry beyond 1e-12 relative.
struct SymmetricEigen {
    Vector eigenvalues;
    Matrix eigenvectors;
};
SymmetricEigen eig_symmetric(const Matrix& a);

/// Largest singular value, computed from the symmetric eigenvalues of AtA.
double spectral_norm(const Matrix& a);

double frobenius_norm(const Matrix& a);
double inf_norm(const Vector& v);

}  // namespace hjbqrnet

#endif
