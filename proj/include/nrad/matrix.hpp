#pragma once

#include <cstddef>
#include <vector>

namespace nrad {

// Dense row-major matrix of doubles. Everything in this project is desk
// scale (a few hundred nodes, embedding width 64), so a minimal dense type
// beats pulling in a linear-algebra dependency.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    Matrix operator*(const Matrix& rhs) const;
    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator*=(double s);

    bool operator==(const Matrix& rhs) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Gauss-Jordan inverse with partial pivoting. Throws nrad::Error when the
// matrix is singular to working precision.
Matrix inverse(const Matrix& m);

// Spectral radius of a symmetric non-negative matrix by power iteration.
double spectral_radius(const Matrix& a, int iters = 300);

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace nrad
