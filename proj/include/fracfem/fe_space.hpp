#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/errors.hpp"
#include "fracfem/fractional_calculus.hpp"
#include "fracfem/special_functions.hpp"

namespace fracfem {

/// Uniform partition 0 = x_0 < ... < x_N = 1 with h = 1/N.
class UniformMesh {
public:
    explicit UniformMesh(int n_cells) : n_(n_cells) {
        if (n_cells < 1) {
            throw DomainError("UniformMesh: need at least one cell");
        }
    }

    [[nodiscard]] int n_cells() const { return n_; }
    [[nodiscard]] double h() const { return 1.0 / n_; }
    /// Node x_i = i / N; x_0 = 0 and x_N = 1 exactly.
    [[nodiscard]] double node(int i) const { return static_cast<double>(i) / n_; }
    /// Number of interior (unconstrained) nodes.
    [[nodiscard]] int n_interior() const { return n_ - 1; }

    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(n_) + 1);
        for (int i = 0; i <= n_; ++i) {
            out[static_cast<std::size_t>(i)] = node(i);
        }
        return out;
    }

    /// Index m of the cell [x_{m-1}, x_m] containing x (right-closed at 1).
    [[nodiscard]] int cell_of(double x) const {
        int m = static_cast<int>(std::floor(x * n_)) + 1;
        return std::clamp(m, 1, n_);
    }

    friend bool operator==(const UniformMesh&, const UniformMesh&) = default;

private:
    int n_;
};

/// Mesh for refinement level k: N = 10 * 2^k cells, and N = 5 for k = -1.
inline UniformMesh build_mesh(int k) {
    if (k < -1 || k > 8) {
        throw DomainError("build_mesh: refinement level must lie in [-1, 8], got " + std::to_string(k));
    }
    return UniformMesh(k == -1 ? 5 : 10 * (1 << k));
}

/// Piecewise-linear hat functions phi_1..phi_{N-1} (homogeneous Dirichlet).
class HatBasis {
public:
    explicit HatBasis(UniformMesh mesh) : mesh_(mesh) {}

    [[nodiscard]] const UniformMesh& mesh() const { return mesh_; }
    [[nodiscard]] int size() const { return mesh_.n_interior(); }

    [[nodiscard]] double eval(int i, double x) const {
        check(i);
        const double t = std::abs(x - mesh_.node(i)) * mesh_.n_cells();
        return t < 1.0 ? 1.0 - t : 0.0;
    }

    /// +1/h on [x_{i-1}, x_i), -1/h on [x_i, x_{i+1}), 0 elsewhere.
    [[nodiscard]] double deriv(int i, double x) const {
        check(i);
        if (x >= mesh_.node(i - 1) && x < mesh_.node(i)) {
            return mesh_.n_cells();
        }
        if (x >= mesh_.node(i) && x < mesh_.node(i + 1)) {
            return -static_cast<double>(mesh_.n_cells());
        }
        return 0.0;
    }

private:
    void check(int i) const {
        if (i < 1 || i > mesh_.n_interior()) {
            throw DomainError("HatBasis: index " + std::to_string(i) + " outside 1.." +
                              std::to_string(mesh_.n_interior()));
        }
    }

    UniformMesh mesh_;
};

inline double hat_eval(const HatBasis& basis, int i, double x) { return basis.eval(i, x); }
inline double hat_deriv(const HatBasis& basis, int i, double x) { return basis.deriv(i, x); }

/// Test functions phi_i - gamma_i (1-x)^{s-1}, each orthogonal to x^{1-s}.
class CaputoTestSpace {
public:
    CaputoTestSpace(HatBasis basis, FracOrder s) : basis_(std::move(basis)), s_(s) {
        const double sv = s.value();
        const double a = 2.0 - sv;
        // int_0^1 x^{1-s} (1-x)^{s-1} dx = B(2-s, s)
        denominator_ = beta_fn(a, sv);
        // G'' = x^{1-s}; int x^{1-s} phi_i = (G(x_{i-1}) - 2 G(x_i) + G(x_{i+1})) / h
        const auto G = [a](double x) { return std::pow(x, a + 1.0) / (a * (a + 1.0)); };
        const UniformMesh& m = basis_.mesh();
        const double inv_h = m.n_cells();
        gammas_.resize(static_cast<std::size_t>(basis_.size()));
        for (int i = 1; i <= basis_.size(); ++i) {
            const double numer = (G(m.node(i - 1)) - 2.0 * G(m.node(i)) + G(m.node(i + 1))) * inv_h;
            gammas_[static_cast<std::size_t>(i - 1)] = numer / denominator_;
        }
    }

    [[nodiscard]] const HatBasis& basis() const { return basis_; }
    [[nodiscard]] const UniformMesh& mesh() const { return basis_.mesh(); }
    [[nodiscard]] FracOrder order() const { return s_; }
    [[nodiscard]] double denominator() const { return denominator_; }
    [[nodiscard]] std::span<const double> gammas() const { return gammas_; }
    [[nodiscard]] double gamma(int i) const { return gammas_.at(static_cast<std::size_t>(i - 1)); }

    /// The correction mode (1-x)^{s-1}.
    [[nodiscard]] double correction(double x) const { return std::pow(1.0 - x, s_.value() - 1.0); }

    [[nodiscard]] double eval(int i, double x) const { return basis_.eval(i, x) - gamma(i) * correction(x); }

private:
    HatBasis basis_;
    FracOrder s_;
    double denominator_ = 0.0;
    std::vector<double> gammas_;
};

inline CaputoTestSpace caputo_gammas(const HatBasis& basis, FracOrder s) { return CaputoTestSpace(basis, s); }

/// u_h = sum_i c_i phi_i over the interior hats of a uniform mesh.
class FEFunction {
public:
    explicit FEFunction(UniformMesh mesh) : mesh_(mesh), coeffs_(static_cast<std::size_t>(mesh.n_interior()), 0.0) {}

    FEFunction(UniformMesh mesh, std::vector<double> coefficients) : mesh_(mesh), coeffs_(std::move(coefficients)) {
        if (coeffs_.size() != static_cast<std::size_t>(mesh_.n_interior())) {
            throw DomainError("FEFunction: coefficient count does not match interior node count");
        }
    }

    [[nodiscard]] const UniformMesh& mesh() const { return mesh_; }
    [[nodiscard]] std::span<const double> coefficients() const { return coeffs_; }
    [[nodiscard]] std::span<double> coefficients() { return coeffs_; }

    /// Value at node i in 0..N (zero at the boundary nodes).
    [[nodiscard]] double nodal(int i) const {
        if (i <= 0 || i >= mesh_.n_cells()) {
            return 0.0;
        }
        return coeffs_[static_cast<std::size_t>(i - 1)];
    }

    [[nodiscard]] double operator()(double x) const {
        const int m = mesh_.cell_of(x);
        const double xl = mesh_.node(m - 1);
        const double t = (x - xl) * mesh_.n_cells();
        return (1.0 - t) * nodal(m - 1) + t * nodal(m);
    }

    /// Jumps of u_h' at nodes x_0..x_{N-1}, taking u_h' = 0 left of 0.
    [[nodiscard]] std::vector<double> slope_jumps() const {
        const int n = mesh_.n_cells();
        std::vector<double> jumps(static_cast<std::size_t>(n));
        double prev_slope = 0.0;
        for (int j = 0; j < n; ++j) {
            const double slope = (nodal(j + 1) - nodal(j)) * n;
            jumps[static_cast<std::size_t>(j)] = slope - prev_slope;
            prev_slope = slope;
        }
        return jumps;
    }

private:
    UniformMesh mesh_;
    std::vector<double> coeffs_;
};

/// Nodal interpolant c_i = f(x_i).
template <class F>
FEFunction interpolate(F&& f, const HatBasis& basis) {
    const UniformMesh& mesh = basis.mesh();
    std::vector<double> c(static_cast<std::size_t>(basis.size()));
    for (int i = 1; i <= basis.size(); ++i) {
        const double v = f(mesh.node(i));
        if (!std::isfinite(v)) {
            throw DomainError("interpolate: non-finite value at node " + std::to_string(i));
        }
        c[static_cast<std::size_t>(i - 1)] = v;
    }
    return FEFunction(mesh, std::move(c));
}

} // namespace fracfem
