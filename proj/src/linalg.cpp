#include "hjbqrnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hjbqrnet {

namespace {

constexpr double kDeflationTol = 1e-14;  // relative subdiagonal deflation

double sign_with(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

double pythag(double a, double b) { return std::hypot(a, b); }

template <typename Scalar>
void lu_factor_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                       std::vector<Eigen::Index>& pivots) {
    const Eigen::Index n = a.rows();
    pivots.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        double best = std::abs(a(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivots[k] = p;
        if (!(best > 0.0) || !std::isfinite(best))
            throw SingularMatrixError("lu: pivot " + std::to_string(k) +
                                      " is zero to working precision");
        if (p != k) a.row(p).swap(a.row(k));
        const Eigen::Index tail = n - k - 1;
        if (tail > 0) {
            a.col(k).segment(k + 1, tail) /= a(k, k);
            a.block(k + 1, k + 1, tail, tail).noalias() -=
                a.col(k).segment(k + 1, tail) * a.row(k).segment(k + 1, tail);
        }
    }
}

template <typename Scalar>
void lu_solve_inplace(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& lu,
                      const std::vector<Eigen::Index>& pivots,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
    const Eigen::Index n = lu.rows();
    // The factorization swaps full rows (P A = L U), so the permutation is
    // applied to the right-hand side in full before the triangular solves.
    for (Eigen::Index k = 0; k < n; ++k)
        if (pivots[k] != k) std::swap(x(pivots[k]), x(k));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = k + 1; i < n; ++i) x(i) -= lu(i, k) * x(k);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Scalar s = x(i);
        for (Eigen::Index j = i + 1; j < n; ++j) s -= lu(i, j) * x(j);
        x(i) = s / lu(i, i);
    }
}

// Householder reduction to upper Hessenberg form (eigenvalues only, no
// transform accumulation needed).
void hessenberg_inplace(Matrix& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        Eigen::Index len = n - k - 1;
        Vector x = a.block(k + 1, k, len, 1);
        double norm = x.norm();
        if (norm == 0.0) continue;
        double alpha = -sign_with(norm, x(0));
        Vector v = x;
        v(0) -= alpha;
        double vn = v.norm();
        if (vn < 1e-300) continue;
        v /= vn;
        a.block(k + 1, k, len, n - k) -= 2.0 * v * (v.transpose() * a.block(k + 1, k, len, n - k));
        a.block(0, k + 1, n, len) -= 2.0 * (a.block(0, k + 1, n, len) * v) * v.transpose();
        a(k + 1, k) = alpha;
        for (Eigen::Index i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; fills wr/wi.
void hqr_eigenvalues(Matrix& a, Vector& wr, Vector& wi) {
    const Eigen::Index n = a.rows();
    wr.resize(n);
    wi.resize(n);
    if (n == 0) return;

    double anorm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = std::max<Eigen::Index>(i - 1, 0); j < n; ++j)
            anorm += std::fabs(a(i, j));
    if (anorm == 0.0) anorm = 1.0;

    const long sweep_cap = 100 * static_cast<long>(n);
    long sweeps = 0;

    Eigen::Index nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        Eigen::Index l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= kDeflationTol * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a(nn, nn);
            if (l == nn) {
                wr(nn) = x + t;
                wi(nn) = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::fabs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_with(z, p);
                        wr(nn - 1) = wr(nn) = x + z;
                        if (z != 0.0) wr(nn) = x - w / z;
                        wi(nn - 1) = wi(nn) = 0.0;
                    } else {
                        wr(nn - 1) = wr(nn) = x + p;
                        wi(nn) = z;
                        wi(nn - 1) = -z;
                    }
                    nn -= 2;
                } else {
                    if (its == 30 || ++sweeps > sweep_cap)
                        throw NumericalError("eig_general: QR iteration did not converge");
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (Eigen::Index i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    double p = 0, q = 0, r = 0, z = 0;
                    Eigen::Index m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) + std::fabs(z) +
                                                   std::fabs(a(m + 1, m + 1)));
                        if (u <= kDeflationTol * v) break;
                    }
                    if (m < l) m = l;
                    for (Eigen::Index i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (Eigen::Index k = m; k <= nn - 1; ++k) {
                        double x2 = 0.0;
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x2 = std::fabs(p) + std::fabs(q) + std::fabs(r);
                            if (x2 != 0.0) {
                                p /= x2;
                                q /= x2;
                                r /= x2;
                            }
                        }
                        double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x2;
                        }
                        p += s;
                        double xf = p / s;
                        double yf = q / s;
                        double zf = r / s;
                        q /= p;
                        r /= p;
                        for (Eigen::Index j = k; j <= nn; ++j) {
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                pp += r * a(k + 2, j);
                                a(k + 2, j) -= pp * zf;
                            }
                            a(k + 1, j) -= pp * yf;
                            a(k, j) -= pp * xf;
                        }
                        Eigen::Index mmin = std::min(nn, k + 3);
                        for (Eigen::Index i = l; i <= mmin; ++i) {
                            double pp = xf * a(i, k) + yf * a(i, k + 1);
                            if (k != nn - 1) {
                                pp += zf * a(i, k + 2);
                                a(i, k + 2) -= pp * r;
                            }
                            a(i, k + 1) -= pp * q;
                            a(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols())
        throw DimensionError(std::string(what) + ": matrix must be square");
    if (!a.allFinite())
        throw DimensionError(std::string(what) + ": non-finite entries");
}

// Householder tridiagonalization with accumulation (tred2).
void tridiagonalize(Matrix& z, Vector& d, Vector& e) {
    const Eigen::Index n = z.rows();
    d.resize(n);
    e.resize(n);
    for (Eigen::Index i = n - 1; i >= 1; --i) {
        Eigen::Index l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (Eigen::Index k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e(i) = z(i, l);
            } else {
                for (Eigen::Index k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e(i) = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (Eigen::Index j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (Eigen::Index k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (Eigen::Index k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e(j) = g / h;
                    f += e(j) * z(i, j);
                }
                double hh = f / (h + h);
                for (Eigen::Index j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e(j) = g = e(j) - hh * f;
                    for (Eigen::Index k = 0; k <= j; ++k)
                        z(j, k) -= f * e(k) + g * z(i, k);
                }
            }
        } else {
            e(i) = z(i, l);
        }
        d(i) = h;
    }
    d(0) = 0.0;
    e(0) = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i) != 0.0) {
            for (Eigen::Index j = 0; j < i; ++j) {
                double g = 0.0;
                for (Eigen::Index k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (Eigen::Index k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d(i) = z(i, i);
        z(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on a tridiagonal matrix with eigenvector accumulation
// (tql2). d holds the diagonal, e the subdiagonal in e(1..n-1).
void ql_implicit(Vector& d, Vector& e, Matrix& z) {
    const Eigen::Index n = d.size();
    for (Eigen::Index i = 1; i < n; ++i) e(i - 1) = e(i);
    e(n - 1) = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
        int iter = 0;
        Eigen::Index m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d(m)) + std::fabs(d(m + 1));
                if (std::fabs(e(m)) <= 1e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw NumericalError("eig_symmetric: QL iteration did not converge");
                double g = (d(l + 1) - d(l)) / (2.0 * e(l));
                double r = pythag(g, 1.0);
                g = d(m) - d(l) + e(l) / (g + sign_with(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                Eigen::Index i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e(i);
                    double b = c * e(i);
                    r = pythag(f, g);
                    e(i + 1) = r;
                    if (r == 0.0) {
                        d(i + 1) -= p;
                        e(m) = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d(i + 1) - p;
                    r = (d(i) - g) * s + 2.0 * c * b;
                    p = s * r;
                    d(i + 1) = g + p;
                    g = c * r - b;
                    for (Eigen::Index k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d(l) -= p;
                e(l) = g;
                e(m) = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

LuFactorization::LuFactorization(const Matrix& a) : lu_(a) {
    require_square(a, "lu");
    lu_factor_inplace<double>(lu_, pivots_);
}

Vector LuFactorization::solve(const Vector& b) const {
    if (b.size() != lu_.rows()) throw DimensionError("lu_solve: rhs size mismatch");
    Vector x = b;
    lu_solve_inplace<double>(lu_, pivots_, x);
    return x;
}

Matrix LuFactorization::solve(const Matrix& b) const {
    if (b.rows() != lu_.rows()) throw DimensionError("lu_solve: rhs rows mismatch");
    Matrix x(b.rows(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        Vector col = b.col(j);
        lu_solve_inplace<double>(lu_, pivots_, col);
        x.col(j) = col;
    }
    return x;
}

Vector lu_solve(const Matrix& a, const Vector& b) {
    return LuFactorization(a).solve(b);
}

BandedLu::BandedLu(Eigen::Index n, Eigen::Index kl, Eigen::Index ku)
    : n_(n), kl_(kl), ku_(ku), store_(Matrix::Zero(2 * kl + ku + 1, n)) {
    if (n <= 0 || kl < 0 || ku < 0) throw DimensionError("banded_lu: bad sizes");
}

double& BandedLu::at(Eigen::Index i, Eigen::Index j) {
    // Upper bandwidth extends to ku+kl to hold pivoting fill-in.
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_ + kl_)
        throw DimensionError("banded_lu: entry outside band");
    return store_(kl_ + ku_ + i - j, j);
}

void BandedLu::factorize() {
    pivots_.resize(n_);
    auto entry = [&](Eigen::Index i, Eigen::Index j) -> double& {
        return store_(kl_ + ku_ + i - j, j);
    };
    for (Eigen::Index j = 0; j < n_; ++j) {
        Eigen::Index km = std::min(kl_, n_ - 1 - j);
        Eigen::Index p = j;
        double best = std::fabs(entry(j, j));
        for (Eigen::Index i = j + 1; i <= j + km; ++i) {
            double v = std::fabs(entry(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivots_[j] = p;
        if (!(best > 0.0) || !std::isfinite(best))
            throw SingularMatrixError("banded_lu: pivot " + std::to_string(j) +
                                      " is zero to working precision");
        Eigen::Index jmax = std::min(j + kl_ + ku_, n_ - 1);
        if (p != j)
            for (Eigen::Index c = j; c <= jmax; ++c) std::swap(entry(p, c), entry(j, c));
        for (Eigen::Index i = j + 1; i <= j + km; ++i) {
            entry(i, j) /= entry(j, j);
            double m = entry(i, j);
            for (Eigen::Index c = j + 1; c <= jmax; ++c) entry(i, c) -= m * entry(j, c);
        }
    }
    factored_ = true;
}

Vector BandedLu::solve(const Vector& b) const {
    if (!factored_) throw NumericalError("banded_lu: solve before factorize");
    if (b.size() != n_) throw DimensionError("banded_lu: rhs size mismatch");
    auto entry = [&](Eigen::Index i, Eigen::Index j) -> double {
        return store_(kl_ + ku_ + i - j, j);
    };
    Vector x = b;
    // Band factorization swaps only columns >= j, so the elementary
    // permutations interleave with the eliminations (gbtrs-style).
    for (Eigen::Index j = 0; j < n_; ++j) {
        if (pivots_[j] != j) std::swap(x(pivots_[j]), x(j));
        Eigen::Index km = std::min(kl_, n_ - 1 - j);
        for (Eigen::Index i = j + 1; i <= j + km; ++i) x(i) -= entry(i, j) * x(j);
    }
    for (Eigen::Index i = n_ - 1; i >= 0; --i) {
        double s = x(i);
        Eigen::Index jmax = std::min(i + kl_ + ku_, n_ - 1);
        for (Eigen::Index j = i + 1; j <= jmax; ++j) s -= entry(i, j) * x(j);
        x(i) = s / entry(i, i);
    }
    return x;
}

Spectrum eig_general(const Matrix& a) {
    require_square(a, "eig_general");
    const Eigen::Index n = a.rows();
    Spectrum spec;
    if (n == 0) return spec;
    Matrix h = a;
    hessenberg_inplace(h);
    Vector wr, wi;
    hqr_eigenvalues(h, wr, wi);
    spec.eigenvalues.reserve(n);
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        spec.eigenvalues.emplace_back(wr(i), wi(i));
        max_re = std::max(max_re, wr(i));
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (x.real() != y.real()) return x.real() < y.real();
                  return x.imag() < y.imag();
              });
    spec.max_real_part = max_re;
    return spec;
}

EigenPairs eig_general_with_vectors(const Matrix& a) {
    require_square(a, "eig_general");
    const Eigen::Index n = a.rows();
    Spectrum spec = eig_general(a);
    EigenPairs pairs;
    pairs.values = spec.eigenvalues;
    pairs.vectors.reserve(n);
    const double anorm = std::max(frobenius_norm(a), 1e-300);
    using CMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
    using CVector = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>;
    for (const auto& lambda : pairs.values) {
        // Inverse iteration with a slightly perturbed shift.
        CMatrix shifted = a.cast<std::complex<double>>();
        std::complex<double> mu = lambda + std::complex<double>(1e-10 * anorm, 1e-10 * anorm);
        for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= mu;
        std::vector<Eigen::Index> piv;
        lu_factor_inplace<std::complex<double>>(shifted, piv);
        CVector v = CVector::Constant(n, std::complex<double>(1.0, 0.0));
        v /= v.norm();
        for (int it = 0; it < 4; ++it) {
            lu_solve_inplace<std::complex<double>>(shifted, piv, v);
            double nv = v.norm();
            if (!(nv > 0.0) || !std::isfinite(nv))
                throw NumericalError("eig_general: inverse iteration breakdown");
            v /= nv;
        }
        double resid = (a.cast<std::complex<double>>() * v - lambda * v).norm();
        if (resid > 1e-8 * anorm)
            throw NumericalError("eig_general: eigenpair residual " + format_g17(resid) +
                                 " exceeds tolerance");
        pairs.vectors.push_back(v);
    }
    return pairs;
}

SymmetricEigen eig_symmetric(const Matrix& a) {
    require_square(a, "eig_symmetric");
    const Eigen::Index n = a.rows();
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw DimensionError("eig_symmetric: matrix asymmetry " + format_g17(asym) +
                             " beyond tolerance");
    SymmetricEigen result;
    if (n == 0) return result;
    Matrix z = 0.5 * (a + a.transpose());
    Vector d, e;
    tridiagonalize(z, d, e);
    ql_implicit(d, e, z);
    // sort ascending, permuting eigenvector columns alongside
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return d(i) < d(j); });
    result.eigenvalues.resize(n);
    result.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        result.eigenvalues(k) = d(order[k]);
        result.eigenvectors.col(k) = z.col(order[k]);
    }
    return result;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Matrix ata = a.transpose() * a;
    SymmetricEigen eig = eig_symmetric(ata);
    double top = eig.eigenvalues(eig.eigenvalues.size() - 1);
    return std::sqrt(std::max(top, 0.0));
}

double frobenius_norm(const Matrix& a) { return a.norm(); }

double inf_norm(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace hjbqrnet
