#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "fracfem/fe_space.hpp"
#include "fracfem/fractional_calculus.hpp"
#include "fracfem/power_sum.hpp"
#include "fracfem/special_functions.hpp"

namespace fracfem {

namespace detail {

inline double truncated_power(double a, double p) { return a > 0.0 ? std::pow(a, p) : 0.0; }

} // namespace detail

/// Left RL derivative of order s/2 of the hat phi_i:
///   [(x-x_{i-1})_+^b - 2 (x-x_i)_+^b + (x-x_{i+1})_+^b] / (h Gamma(1+b)),  b = 1 - s/2.
inline double left_halfderiv_hat(const UniformMesh& mesh, int i, FracOrder s, double x) {
    const double b = 1.0 - s.half();
    const double scale = mesh.n_cells() * reciprocal_gamma(1.0 + b);
    using detail::truncated_power;
    return scale * (truncated_power(x - mesh.node(i - 1), b) - 2.0 * truncated_power(x - mesh.node(i), b) +
                    truncated_power(x - mesh.node(i + 1), b));
}

/// Right RL derivative of order s/2 of phi_i, the reflection of the left
/// profile: right(i, x) = left(N - i, 1 - x).
inline double right_halfderiv_hat(const UniformMesh& mesh, int i, FracOrder s, double x) {
    const double b = 1.0 - s.half();
    const double scale = mesh.n_cells() * reciprocal_gamma(1.0 + b);
    using detail::truncated_power;
    return scale * (truncated_power(mesh.node(i + 1) - x, b) - 2.0 * truncated_power(mesh.node(i) - x, b) +
                    truncated_power(mesh.node(i - 1) - x, b));
}

enum class Side { Left, Right };

/// Half-order derivative profile of one hat, with the kink points where the
/// truncated powers switch on.
class HalfDerivProfile {
public:
    HalfDerivProfile(UniformMesh mesh, int i, Side side, FracOrder s) : mesh_(mesh), i_(i), side_(side), s_(s) {
        if (i < 1 || i > mesh.n_interior()) {
            throw DomainError("HalfDerivProfile: basis index out of range");
        }
    }

    [[nodiscard]] double operator()(double x) const {
        return side_ == Side::Left ? left_halfderiv_hat(mesh_, i_, s_, x) : right_halfderiv_hat(mesh_, i_, s_, x);
    }

    [[nodiscard]] std::array<double, 3> kinks() const {
        return {mesh_.node(i_ - 1), mesh_.node(i_), mesh_.node(i_ + 1)};
    }

    [[nodiscard]] int index() const { return i_; }
    [[nodiscard]] Side side() const { return side_; }

private:
    UniformMesh mesh_;
    int i_;
    Side side_;
    FracOrder s_;
};

/// Right RL derivative of order s/2 of (1-x)^{s-1}: Gamma(s)/Gamma(s/2) (1-x)^{s/2-1}.
inline double right_halfderiv_caputo_correction(FracOrder s, double x) {
    if (!(x < 1.0) || x < 0.0) {
        throw DomainError("right_halfderiv_caputo_correction: x must lie in [0, 1)");
    }
    return gamma_ratio(s.value(), s.half()) * std::pow(1.0 - x, s.half() - 1.0);
}

/// Left RL derivative of order s/2 of a PowerSum, as a PowerSum.
inline PowerSum left_halfderiv_powersum(const PowerSum& u, FracOrder s) { return powersum_rl_derivative(u, s.half()); }

/// Pointwise form; x = 0 is rejected when a resulting exponent is negative.
inline double left_halfderiv_powersum(const PowerSum& u, FracOrder s, double x) {
    double sum = 0.0;
    for (const auto& t : u.terms()) {
        sum += t.coefficient * rl_derivative_power(t.exponent, s.half(), x);
    }
    return sum;
}

/// Left RL derivative of order s/2 of a finite element function:
/// sum_j jump_j (x - x_j)_+^{1-s/2} / Gamma(2 - s/2), over the slope jumps.
class FEHalfDerivative {
public:
    FEHalfDerivative(const FEFunction& u, FracOrder s)
        : mesh_(u.mesh()), exponent_(1.0 - s.half()), scale_(reciprocal_gamma(2.0 - s.half())),
          jumps_(u.slope_jumps()) {}

    [[nodiscard]] double operator()(double x) const {
        double sum = 0.0;
        const int n = mesh_.n_cells();
        for (int j = 0; j < n; ++j) {
            const double d = x - mesh_.node(j);
            if (d <= 0.0) {
                break;
            }
            const double jump = jumps_[static_cast<std::size_t>(j)];
            if (jump != 0.0) {
                sum += jump * std::pow(d, exponent_);
            }
        }
        return scale_ * sum;
    }

private:
    UniformMesh mesh_;
    double exponent_;
    double scale_;
    std::vector<double> jumps_;
};

} // namespace fracfem
