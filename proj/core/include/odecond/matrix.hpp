#pragma once

#include <span>
#include <vector>

#include "odecond/vec.hpp"

namespace odecond {

/// Dense row-major matrix. Dimensions here are tiny (state dimension d <= 6),
/// so everything is straightforward O(n^3)-style code with no blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Matrix identity(int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const double& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    std::span<const double> values() const { return a_; }

    bool finite() const { return all_finite(a_); }

    void set_zero() { a_.assign(a_.size(), 0.0); }
    void set_identity() {
        set_zero();
        for (int i = 0; i < rows_ && i < cols_; ++i) (*this)(i, i) = 1.0;
    }

    Matrix& operator*=(double s) {
        for (double& x : a_) x *= s;
        return *this;
    }
    Matrix& operator+=(const Matrix& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    bool operator==(const Matrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// out = a * b. `out` must be preallocated to the right shape and must not
/// alias either operand; the accumulation order is fixed (k ascending).
void multiply_into(const Matrix& a, const Matrix& b, Matrix& out);

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);

Vec multiply(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);

enum class MatrixNorm { spectral, frobenius };

/// Operator 2-norm: sqrt of the largest eigenvalue of MᵀM, diagonalized by
/// cyclic Jacobi rotations until the off-diagonal Frobenius mass drops below
/// 1e-14 · ‖MᵀM‖_F. Throws numeric_domain_error on non-finite input.
double norm2(const Matrix& m);

double matrix_norm(const Matrix& m, MatrixNorm kind);

}  // namespace odecond
