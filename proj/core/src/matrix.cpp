#include "odecond/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "odecond/errors.hpp"

namespace odecond {

void multiply_into(const Matrix& a, const Matrix& b, Matrix& out) {
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += a(i, l) * b(l, j);
            out(i, j) = s;
        }
    }
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    multiply_into(a, b, out);
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    out *= s;
    return out;
}

Matrix operator+(Matrix a, const Matrix& b) {
    a += b;
    return a;
}

Matrix operator-(Matrix a, const Matrix& b) {
    a -= b;
    return a;
}

Vec multiply(const Matrix& a, std::span<const double> x) {
    Vec y(static_cast<size_t>(a.rows()), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.values()) s += x * x;
    return std::sqrt(s);
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    for (double x : m.values()) s = std::max(s, std::abs(x));
    return s;
}

namespace {

constexpr int kMaxJacobiDim = 16;
constexpr int kMaxJacobiSweeps = 64;

// Largest eigenvalue of the symmetric matrix S (n x n, row-major buffer),
// by cyclic Jacobi. S is destroyed.
double jacobi_largest_eigenvalue(double* s, int n) {
    auto at = [&](int i, int j) -> double& { return s[i * n + j]; };

    double fro = 0.0;
    for (int i = 0; i < n * n; ++i) fro += s[i] * s[i];
    fro = std::sqrt(fro);
    if (fro == 0.0) return 0.0;
    const double stop = 1e-14 * fro;

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
        if (std::sqrt(off) < stop) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root of t^2 + 2 tau t - 1 = 0, stable form
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double skp = at(k, p);
                    const double skq = at(k, q);
                    at(k, p) = at(p, k) = c * skp - sn * skq;
                    at(k, q) = at(q, k) = sn * skp + c * skq;
                }
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = at(q, p) = 0.0;
            }
        }
    }

    double lmax = at(0, 0);
    for (int i = 1; i < n; ++i) lmax = std::max(lmax, at(i, i));
    return std::max(lmax, 0.0);
}

double norm2_unscaled(const Matrix& m) {
    const int r = m.rows(), c = m.cols();
    double buf[kMaxJacobiDim * kMaxJacobiDim];
    std::vector<double> heap;
    double* s;
    if (c <= kMaxJacobiDim) {
        s = buf;
    } else {
        heap.resize(static_cast<size_t>(c) * c);
        s = heap.data();
    }
    // S = MᵀM, symmetric; fill upper triangle and mirror
    for (int i = 0; i < c; ++i) {
        for (int j = i; j < c; ++j) {
            double v = 0.0;
            for (int k = 0; k < r; ++k) v += m(k, i) * m(k, j);
            s[i * c + j] = v;
            s[j * c + i] = v;
        }
    }
    return std::sqrt(jacobi_largest_eigenvalue(s, c));
}

}  // namespace

double norm2(const Matrix& m) {
    if (!m.finite()) throw numeric_domain_error("norm2: matrix has non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const double scale = max_abs(m);
    if (scale == 0.0) return 0.0;
    // Pre-scale far from 1 so MᵀM can neither overflow nor underflow.
    if (scale > 1e100 || scale < 1e-100) {
        Matrix ms = m;
        ms *= 1.0 / scale;
        return scale * norm2_unscaled(ms);
    }
    return norm2_unscaled(m);
}

double matrix_norm(const Matrix& m, MatrixNorm kind) {
    if (kind == MatrixNorm::frobenius) {
        if (!m.finite()) throw numeric_domain_error("matrix_norm: non-finite entries");
        return frobenius_norm(m);
    }
    return norm2(m);
}

}  // namespace odecond
