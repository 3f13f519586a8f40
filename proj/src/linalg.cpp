#include "adyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace adyn {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("Matrix: ragged rows");
        std::size_t j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("Matrix: shape mismatch in *");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix: shape mismatch in -");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

std::vector<double> Matrix::operator*(const std::vector<double>& x) const {
    if (cols_ != x.size()) throw std::invalid_argument("Matrix: shape mismatch in M*x");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double inf_norm(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

namespace {

// In-place LU with partial pivoting. Returns the permutation sign, fills
// `piv`; a zero pivot leaves `singular` set.
int lu_factor(Matrix& a, std::vector<std::size_t>& piv, bool& singular) {
    const std::size_t n = a.rows();
    piv.resize(n);
    std::iota(piv.begin(), piv.end(), std::size_t{0});
    int sign = 1;
    singular = false;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(piv[k], piv[p]);
            sign = -sign;
        }
        if (a(k, k) == 0.0) {
            singular = true;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double lik = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    return sign;
}

}  // namespace

LuResult lu_solve(Matrix a, std::vector<double> b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw std::invalid_argument("lu_solve: shape mismatch");
    const std::size_t n = a.rows();
    std::vector<std::size_t> piv;
    LuResult res;
    int sign = lu_factor(a, piv, res.singular);
    (void)sign;
    double umax = 0.0, umin = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::abs(a(k, k));
        umax = std::max(umax, d);
        umin = (k == 0) ? d : std::min(umin, d);
    }
    res.condition_estimate = (umin > 0.0) ? umax / umin
                                          : std::numeric_limits<double>::infinity();
    if (res.singular) return res;

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= a(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= a(i, j) * x[j];
        x[i] /= a(i, i);
    }
    res.solution = std::move(x);
    return res;
}

double lu_det(Matrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_det: not square");
    std::vector<std::size_t> piv;
    bool singular = false;
    const int sign = lu_factor(a, piv, singular);
    if (singular) return 0.0;
    double d = sign;
    for (std::size_t k = 0; k < a.rows(); ++k) d *= a(k, k);
    return d;
}

SymmetricEigen jacobi_eigen_symmetric(Matrix a, int max_sweeps) {
    if (a.rows() != a.cols()) throw std::invalid_argument("jacobi: not square");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);

    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double cth = 1.0 / std::sqrt(1.0 + t * t);
                const double sth = t * cth;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = cth * akp - sth * akq;
                    a(k, q) = sth * akp + cth * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cth * apk - sth * aqk;
                    a(q, k) = sth * apk + cth * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = cth * vkp - sth * vkq;
                    v(k, q) = sth * vkp + cth * vkq;
                }
            }
        }
    }

    // A = V diag(mu) V^T with eigenvectors in V's columns; rows of Q.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = a(i, i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return mu[i] < mu[j]; });

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    out.q = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = order[r];
        out.eigenvalues[r] = mu[c];
        std::size_t imax = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, c)) > std::abs(v(imax, c))) imax = k;
        const double s = (v(imax, c) < 0.0) ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.q(r, k) = s * v(k, c);
    }
    return out;
}

}  // namespace adyn
