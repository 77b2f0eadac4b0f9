#include "nrad/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "nrad/errors.hpp"

namespace nrad {

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) {
        throw ShapeMismatch("matrix multiply: inner dimensions differ");
    }
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* lrow = row(i);
        double* orow = out.row(i);
        for (std::size_t k = 0; k < cols_; ++k) {
            const double v = lrow[k];
            if (v == 0.0) continue;
            const double* rrow = rhs.row(k);
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                orow[j] += v * rrow[j];
            }
        }
    }
    return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw ShapeMismatch("matrix add: shapes differ");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix inverse(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeMismatch("inverse: matrix not square");
    }
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a(r, col)) > best) {
                best = std::fabs(a(r, col));
                pivot = r;
            }
        }
        if (best < 1e-12) {
            throw Error("inverse: matrix is singular to working precision");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const double d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double spectral_radius(const Matrix& a, int iters) {
    if (a.rows() != a.cols()) {
        throw ShapeMismatch("spectral_radius: matrix not square");
    }
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    // Deterministic start with a mild slope so the vector is not orthogonal
    // to the leading eigenvector of a symmetric matrix.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> w = matvec(a, v);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-300) return 0.0;
        for (double& x : w) x /= norm;
        double next = 0.0;
        std::vector<double> aw = matvec(a, w);
        for (std::size_t i = 0; i < n; ++i) next += w[i] * aw[i];
        v = std::move(w);
        if (it > 10 && std::fabs(next - lambda) < 1e-14 * std::max(1.0, std::fabs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::fabs(lambda);
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (m.cols() != v.size()) {
        throw ShapeMismatch("matvec: dimension mismatch");
    }
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += r[j] * v[j];
        out[i] = acc;
    }
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ShapeMismatch("dot: lengths differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;  // zero vectors carry no direction
    return dot(a, b) / (na * nb);
}

}  // namespace nrad
