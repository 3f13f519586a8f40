#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace adyn {

/// Dense row-major matrix. Everything in this project is small (<= 24x24),
/// so no attempt is made at blocking or expression templates.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    std::vector<double> operator*(const std::vector<double>& x) const;

    double max_abs() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double inf_norm(const std::vector<double>& x);
double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b);

struct LuResult {
    bool singular = false;
    double condition_estimate = 0.0;  // max|U_ii| / min|U_ii|, crude
    std::vector<double> solution;
};

/// Solve A x = b by LU with partial pivoting.
LuResult lu_solve(Matrix a, std::vector<double> b);

/// Determinant by LU with partial pivoting.
double lu_det(Matrix a);

struct SymmetricEigen {
    std::vector<double> eigenvalues;  // ascending
    Matrix q;                         // rows are eigenvectors: A = Q^T diag(mu) Q
};

/// Cyclic Jacobi rotations for a symmetric matrix. Row signs are fixed so the
/// largest-magnitude component of each eigenvector is positive.
SymmetricEigen jacobi_eigen_symmetric(Matrix a, int max_sweeps = 64);

}  // namespace adyn
