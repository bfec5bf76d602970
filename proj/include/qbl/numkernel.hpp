/**
 *  @file qbl/numkernel.hpp
 *  @brief Dense real linear algebra and deterministic randomness.
 *
 *  Everything here works on small dense matrices (at most 32x32 for the SVD),
 *  which is all the rest of the library needs. Matrices are row-major values.
 *  Randomness goes through `RandomSource`, a seeded engine that can be split
 *  into independent child streams so that sweeps stay reproducible no matter
 *  how the work is distributed.
 */

#ifndef QBL_NUMKERNEL_HPP
#define QBL_NUMKERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbl {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes or dimensions do not fit together.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A matrix or point set is singular, non-spanning, or otherwise degenerate.
class DegenerateError : public Error {
  public:
    using Error::Error;
};

/// Input outside the domain of an operation (NaN, bad exponent, empty set...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// The requested combination of representation and method is not supported.
class NotImplementedError : public Error {
  public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

using Vector = std::vector<double>;

inline void require_finite(std::span<const double> v, const char *what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DomainError(std::string(what) + ": non-finite entry");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double x : a)
        m = std::max(m, std::abs(x));
    return m;
}

inline Vector scaled(std::span<const double> a, double s) {
    Vector out(a.begin(), a.end());
    for (double &x : out)
        x *= s;
    return out;
}

inline Vector add(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("add: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return out;
}

inline Vector sub(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("sub: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

/// a += s * b
inline void axpy(double s, std::span<const double> b, std::span<double> a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += s * b[i];
}

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Row-major dense matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionError("Matrix: entry count does not match shape");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    /// Matrix whose columns are the given vectors.
    static Matrix from_columns(const std::vector<Vector> &cols) {
        if (cols.empty())
            return {};
        Matrix m(cols.front().size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m.rows())
                throw DimensionError("from_columns: ragged columns");
            for (std::size_t i = 0; i < m.rows(); ++i)
                m(i, j) = cols[j][i];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return data_; }
    std::span<double> entries() noexcept { return data_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Vector apply(std::span<const double> x) const {
        if (x.size() != cols_)
            throw DimensionError("Matrix::apply: vector length mismatch");
        Vector y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j)
                s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    /// y = A^T x
    Vector apply_transposed(std::span<const double> x) const {
        if (x.size() != rows_)
            throw DimensionError("Matrix::apply_transposed: vector length mismatch");
        Vector y(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                y[j] += (*this)(i, j) * x[i];
        return y;
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("Matrix product: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(Matrix a, const Matrix &b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] += b.data_[i];
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix &b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] -= b.data_[i];
        return a;
    }

    friend Matrix operator*(double s, Matrix a) {
        for (double &x : a.data_)
            x *= s;
        return a;
    }

    double max_abs() const { return norm_inf(data_); }

    double frobenius() const { return norm2(data_); }

    bool is_symmetric(double tol) const {
        if (!square())
            return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol)
                    return false;
        return true;
    }

  private:
    void check_same_shape(const Matrix &b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw DimensionError("Matrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Singular value decomposition (one-sided Jacobi)
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxSvdDim = 32;

/// Thin SVD: A = U * diag(singular) * V^T with U (m x k), V (n x k), k = min(m, n).
struct Svd {
    Vector singular; // descending, nonnegative
    Matrix u;
    Matrix v;

    Matrix reconstruct() const {
        Matrix us = u;
        for (std::size_t i = 0; i < us.rows(); ++i)
            for (std::size_t j = 0; j < us.cols(); ++j)
                us(i, j) *= singular[j];
        return us * v.transposed();
    }
};

namespace detail {

/// Completes the columns of `q` flagged in `missing` to an orthonormal set,
/// drawing candidates from the standard basis in order.
inline void complete_orthonormal(Matrix &q, const std::vector<bool> &missing) {
    const std::size_t m = q.rows();
    std::size_t next_basis = 0;
    for (std::size_t j = 0; j < q.cols(); ++j) {
        if (!missing[j])
            continue;
        for (; next_basis < m; ++next_basis) {
            Vector cand = unit_vector(m, next_basis);
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t k = 0; k < q.cols(); ++k) {
                    if (k == j || (missing[k] && k > j))
                        continue;
                    const Vector col = q.column(k);
                    axpy(-dot(col, cand), col, cand);
                }
            const double nrm = norm2(cand);
            if (nrm > 1e-6) {
                for (std::size_t i = 0; i < m; ++i)
                    q(i, j) = cand[i] / nrm;
                ++next_basis;
                break;
            }
        }
    }
}

inline Svd jacobi_svd_tall(const Matrix &a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += w(i, p) * w(i, p);
                    beta += w(i, q) * w(i, q);
                    gamma += w(i, p) * w(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated)
            break;
    }

    Vector sv(n);
    for (std::size_t j = 0; j < n; ++j)
        sv[j] = norm2(w.column(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });

    Svd out{Vector(n), Matrix(m, n), Matrix(n, n)};
    const double smax = n ? sv[order[0]] : 0.0;
    std::vector<bool> missing(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.singular[k] = sv[j];
        for (std::size_t i = 0; i < n; ++i)
            out.v(i, k) = v(i, j);
        if (sv[j] > smax * 1e-14 && sv[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i)
                out.u(i, k) = w(i, j) / sv[j];
        } else {
            missing[k] = true;
        }
    }
    complete_orthonormal(out.u, missing);
    return out;
}

} // namespace detail

/// Singular value decomposition by one-sided Jacobi rotations.
/// Matrices beyond 32x32 are rejected.
inline Svd svd(const Matrix &a) {
    if (a.rows() == 0 || a.cols() == 0)
        throw DimensionError("svd: empty matrix");
    if (a.rows() > kMaxSvdDim || a.cols() > kMaxSvdDim)
        throw DimensionError("svd: matrices beyond 32x32 are not supported");
    require_finite(a.entries(), "svd");
    if (a.rows() >= a.cols())
        return detail::jacobi_svd_tall(a);
    Svd t = detail::jacobi_svd_tall(a.transposed());
    return Svd{std::move(t.singular), std::move(t.v), std::move(t.u)};
}

inline Vector singular_values(const Matrix &a) { return svd(a).singular; }

inline double spectral_norm(const Matrix &a) { return singular_values(a).front(); }

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// A = V * diag(values) * V^T with ascending eigenvalues.
struct SymEigen {
    Vector values;
    Matrix vectors; // columns are eigenvectors
};

inline SymEigen sym_eigen(const Matrix &a_in) {
    if (!a_in.square())
        throw DimensionError("sym_eigen: matrix not square");
    require_finite(a_in.entries(), "sym_eigen");
    const std::size_t n = a_in.rows();
    Matrix a = a_in;
    // symmetrize to avoid drifting on tiny asymmetries
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += a(i, j) * a(i, j);
        if (off <= 1e-300 || off <= 1e-32 * std::max(1e-300, a.frobenius() * a.frobenius()))
            break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// f(A) for symmetric A, applied through the eigendecomposition.
template <class F>
Matrix sym_function(const Matrix &a, F &&f) {
    const SymEigen e = sym_eigen(a);
    const std::size_t n = a.rows();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += fk * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cholesky, SPD solves, general solves, least squares
// ---------------------------------------------------------------------------

/// Lower-triangular L with A = L L^T. Throws DegenerateError unless A is
/// symmetric (1e-12 relative) and positive definite.
inline Matrix cholesky(const Matrix &a) {
    if (!a.square())
        throw DimensionError("cholesky: matrix not square");
    require_finite(a.entries(), "cholesky");
    const double scale = std::max(1.0, a.max_abs());
    if (!a.is_symmetric(1e-12 * scale))
        throw DegenerateError("cholesky: matrix not symmetric");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= l(j, k) * l(j, k);
        if (!(d > 1e-300) || d <= 1e-15 * std::abs(a(j, j)))
            throw DegenerateError("cholesky: matrix not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

inline Vector cholesky_solve(const Matrix &l, std::span<const double> b) {
    const std::size_t n = l.rows();
    if (b.size() != n)
        throw DimensionError("cholesky_solve: length mismatch");
    Vector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k)
            y[i] -= l(k, i) * y[k];
        y[i] /= l(i, i);
    }
    return y;
}

inline Vector solve_spd(const Matrix &a, std::span<const double> b) {
    require_finite(b, "solve_spd");
    return cholesky_solve(cholesky(a), b);
}

inline Matrix inverse_spd(const Matrix &a) {
    const Matrix l = cholesky(a);
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vector col = cholesky_solve(l, unit_vector(n, j));
        for (std::size_t i = 0; i < n; ++i)
            inv(i, j) = col[i];
    }
    // exact symmetry
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
    return inv;
}

/// Solves a square system by Gaussian elimination with partial pivoting.
inline Vector solve(const Matrix &a, std::span<const double> b) {
    if (!a.square() || b.size() != a.rows())
        throw DimensionError("solve: shape mismatch");
    const std::size_t n = a.rows();
    Matrix m = a;
    Vector x(b.begin(), b.end());
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c)))
                piv = r;
        if (std::abs(m(piv, c)) <= 1e-13 * scale)
            throw DegenerateError("solve: singular matrix");
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k)
                std::swap(m(c, k), m(piv, k));
            std::swap(x[c], x[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            if (f == 0.0)
                continue;
            for (std::size_t k = c; k < n; ++k)
                m(r, k) -= f * m(c, k);
            x[r] -= f * x[c];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k)
            x[i] -= m(i, k) * x[k];
        x[i] /= m(i, i);
    }
    return x;
}

inline Matrix inverse(const Matrix &a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vector col = solve(a, unit_vector(n, j));
        for (std::size_t i = 0; i < n; ++i)
            inv(i, j) = col[i];
    }
    return inv;
}

/// Moore-Penrose pseudo-inverse of a matrix with full column rank, computed
/// through a thin QR factorization (modified Gram-Schmidt). Returns false
/// when the columns are numerically dependent.
inline bool left_pseudo_inverse(const Matrix &a, Matrix &out, double rel_tol = 1e-10) {
    const std::size_t m = a.rows(), n = a.cols();
    if (n > m)
        return false;
    Matrix q = a;
    Matrix r(n, n);
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < j; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += q(i, k) * q(i, j);
                r(k, j) += s;
                for (std::size_t i = 0; i < m; ++i)
                    q(i, j) -= s * q(i, k);
            }
        double nrm = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        if (nrm <= rel_tol * scale)
            return false;
        r(j, j) = nrm;
        for (std::size_t i = 0; i < m; ++i)
            q(i, j) /= nrm;
    }
    // pinv = R^{-1} Q^T
    out = Matrix(n, m);
    for (std::size_t col = 0; col < m; ++col) {
        Vector y(n);
        for (std::size_t k = 0; k < n; ++k)
            y[k] = q(col, k);
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k)
                y[i] -= r(i, k) * y[k];
            y[i] /= r(i, i);
        }
        for (std::size_t k = 0; k < n; ++k)
            out(k, col) = y[k];
    }
    return true;
}

/// Orthonormalizes `vectors` (modified Gram-Schmidt, two passes). Throws
/// DegenerateError when they are linearly dependent.
inline std::vector<Vector> orthonormalize(const std::vector<Vector> &vectors, double rel_tol = 1e-10) {
    std::vector<Vector> basis;
    for (const Vector &v : vectors) {
        Vector w = v;
        const double original = norm2(v);
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector &b : basis)
                axpy(-dot(b, w), b, w);
        const double nrm = norm2(w);
        if (!(original > 0.0) || nrm <= rel_tol * original)
            throw DegenerateError("orthonormalize: vectors are linearly dependent");
        basis.push_back(scaled(w, 1.0 / nrm));
    }
    return basis;
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n, found
/// by Gram-Schmidt over the standard basis in index order. `basis` must
/// already be orthonormal.
inline std::vector<Vector> orthogonal_complement(const std::vector<Vector> &basis, std::size_t n) {
    std::vector<Vector> all = basis;
    std::vector<Vector> comp;
    for (double threshold : {1e-3, 1e-9}) {
        for (std::size_t i = 0; i < n && all.size() < n; ++i) {
            Vector w = unit_vector(n, i);
            for (int pass = 0; pass < 2; ++pass)
                for (const Vector &b : all)
                    axpy(-dot(b, w), b, w);
            const double nrm = norm2(w);
            if (nrm > threshold) {
                Vector u = scaled(w, 1.0 / nrm);
                all.push_back(u);
                comp.push_back(std::move(u));
            }
        }
        if (all.size() == n)
            break;
    }
    if (all.size() != n)
        throw DegenerateError("orthogonal_complement: could not complete basis");
    return comp;
}

inline double determinant_spd(const Matrix &a) {
    const Matrix l = cholesky(a);
    double d = 1.0;
    for (std::size_t i = 0; i < l.rows(); ++i)
        d *= l(i, i) * l(i, i);
    return d;
}

inline double log_determinant_spd(const Matrix &a) {
    const Matrix l = cholesky(a);
    double d = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i)
        d += 2.0 * std::log(l(i, i));
    return d;
}

inline double determinant(const Matrix &a) {
    if (!a.square())
        throw DimensionError("determinant: matrix not square");
    const std::size_t n = a.rows();
    Matrix m = a;
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c)))
                piv = r;
        if (m(piv, c) == 0.0)
            return 0.0;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k)
                std::swap(m(c, k), m(piv, k));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t k = c; k < n; ++k)
                m(r, k) -= f * m(c, k);
        }
    }
    return det;
}

/// Numerical rank from singular values (relative threshold).
inline std::size_t numerical_rank(const Matrix &a, double rel_tol = 1e-10) {
    const Vector s = singular_values(a);
    if (s.front() == 0.0)
        return 0;
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](double x) { return x > rel_tol * s.front(); }));
}

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Seeded pseudo-random stream (mt19937_64 engine; Box-Muller normals).
///
/// Identical seeds produce identical streams on every platform: the uniform
/// and normal transforms are implemented here rather than taken from
/// <random>'s implementation-defined distributions. Child streams come from
/// `split`, which hashes (seed, index) into a fresh seed, so a sweep can hand
/// trial i the stream `rng.split(i)` and get the same values regardless of
/// evaluation order.
class RandomSource {
  public:
    static constexpr const char *algorithm = "mt19937_64+splitmix64-split+box-muller";

    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(detail::splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    RandomSource split(std::uint64_t index) const {
        return RandomSource(detail::splitmix64(seed_ ^ detail::splitmix64(index + 0x5851f42d4c957f2dULL)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0)
            throw DomainError("RandomSource::below: empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    int sign() { return (engine_() >> 63) ? -1 : 1; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// n i.i.d. standard normal entries.
inline Vector gaussian_sample(RandomSource &rng, std::size_t n) {
    if (n == 0)
        throw DomainError("gaussian_sample: n must be at least 1");
    Vector v(n);
    for (double &x : v)
        x = rng.normal();
    return v;
}

inline Matrix gaussian_matrix(RandomSource &rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double &x : m.entries())
        x = rng.normal();
    return m;
}

/// Uniform point on the Euclidean unit sphere.
inline Vector random_direction(RandomSource &rng, std::size_t n) {
    for (;;) {
        Vector v = gaussian_sample(rng, n);
        const double nrm = norm2(v);
        if (nrm > 1e-12)
            return scaled(v, 1.0 / nrm);
    }
}

/// Exact binomial coefficient; throws on overflow.
inline std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        const std::uint64_t g = std::gcd(r, static_cast<std::uint64_t>(i));
        const std::uint64_t rr = r / g, ii = i / g;
        if (rr > std::numeric_limits<std::uint64_t>::max() / num)
            throw DomainError("binomial: overflow");
        r = rr * num / ii;
    }
    return r;
}

} // namespace qbl

#endif // QBL_NUMKERNEL_HPP
