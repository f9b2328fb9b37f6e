#include "smoothrl/linalg.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smoothrl {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Matrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (double v : row(r)) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> v) {
    if (a.cols() != v.size()) throw std::invalid_argument("Matrix-vector product: shape mismatch");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b, double rel_tol) {
    const std::size_t n = a.rows();
    if (!a.square() || b.size() != n) throw std::invalid_argument("lu_solve: shape mismatch");
    const double scale = std::max(a.norm_inf(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        }
        if (!(std::abs(a(piv, k)) > rel_tol * scale)) {
            throw SingularMatrixError("matrix is singular to working precision (column " + std::to_string(k) + ")");
        }
        if (piv != k) {
            std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(piv).begin());
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * b[j];
        b[k] = s / a(k, k);
    }
    return b;
}

Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        const auto col = lu_solve(a, std::move(e));
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
}

} // namespace smoothrl
