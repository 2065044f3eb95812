#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/errors.hpp"

namespace fracfem {

/// Square row-major matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(int n, double fill = 0.0)
        : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {
        if (n < 0) {
            throw DomainError("DenseMatrix: negative dimension");
        }
    }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] int size() const { return n_; }

    double& operator()(int r, int c) { return data_[index(r, c)]; }
    [[nodiscard]] double operator()(int r, int c) const { return data_[index(r, c)]; }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const {
        if (x.size() != static_cast<std::size_t>(n_)) {
            throw DomainError("DenseMatrix::multiply: dimension mismatch");
        }
        std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
        for (int r = 0; r < n_; ++r) {
            const double* row = &data_[index(r, 0)];
            double sum = 0.0;
            for (int c = 0; c < n_; ++c) {
                sum += row[c] * x[static_cast<std::size_t>(c)];
            }
            y[static_cast<std::size_t>(r)] = sum;
        }
        return y;
    }

    /// x^T M x
    [[nodiscard]] double quadratic_form(std::span<const double> x) const {
        const auto y = multiply(x);
        double sum = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            sum += x[k] * y[k];
        }
        return sum;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : data_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    /// Infinity norm (maximum absolute row sum).
    [[nodiscard]] double norm_inf() const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r) {
            double sum = 0.0;
            for (int c = 0; c < n_; ++c) {
                sum += std::abs((*this)(r, c));
            }
            m = std::max(m, sum);
        }
        return m;
    }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    [[nodiscard]] std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
    }

    int n_ = 0;
    std::vector<double> data_;
};

inline double norm2(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

inline double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

/// Gaussian elimination with partial pivoting. A pivot below 1e-13 times
/// the largest matrix entry raises SingularMatrixError.
inline std::vector<double> lu_solve(DenseMatrix m, std::vector<double> rhs) {
    const int n = m.size();
    if (rhs.size() != static_cast<std::size_t>(n)) {
        throw DomainError("lu_solve: right-hand side has wrong length");
    }
    if (!m.all_finite()) {
        throw DomainError("lu_solve: matrix has non-finite entries");
    }
    const double scale = m.max_abs();
    const double threshold = 1e-13 * scale;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m(k, k));
        for (int r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > best) {
                best = std::abs(m(r, k));
                piv = r;
            }
        }
        if (!(best > threshold)) {
            throw SingularMatrixError("lu_solve: pivot " + std::to_string(best) + " at column " +
                                      std::to_string(k) + " below threshold");
        }
        if (piv != k) {
            for (int c = 0; c < n; ++c) {
                std::swap(m(k, c), m(piv, c));
            }
            std::swap(rhs[static_cast<std::size_t>(k)], rhs[static_cast<std::size_t>(piv)]);
        }
        const double inv = 1.0 / m(k, k);
        for (int r = k + 1; r < n; ++r) {
            const double factor = m(r, k) * inv;
            if (factor == 0.0) {
                continue;
            }
            m(r, k) = 0.0;
            for (int c = k + 1; c < n; ++c) {
                m(r, c) -= factor * m(k, c);
            }
            rhs[static_cast<std::size_t>(r)] -= factor * rhs[static_cast<std::size_t>(k)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double sum = rhs[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) {
            sum -= m(r, c) * x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(r)] = sum / m(r, r);
    }
    return x;
}

} // namespace fracfem
