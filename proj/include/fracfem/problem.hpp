#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/errors.hpp"
#include "fracfem/fractional_calculus.hpp"
#include "fracfem/power_sum.hpp"
#include "fracfem/special_functions.hpp"

namespace fracfem {

using Nonlinearity = std::function<double(double, double)>;

/// -D^s u + g(x, u) = f on (0, 1), u(0) = u(1) = 0.
///
/// The right-hand side is split as f(x) = rhs_fractional(x) + rhs_extra(x):
/// a PowerSum (possibly singular at 0) plus a pointwise part, which for
/// manufactured problems is g(x, exact(x)).
struct Problem {
    std::string name;
    DerivativeKind kind = DerivativeKind::RiemannLiouville;
    FracOrder s{1.5};
    Nonlinearity g;
    Nonlinearity g_u;
    PowerSum rhs_fractional;
    std::function<double(double)> rhs_extra;
    std::vector<double> singular_points{0.0};
    std::optional<PowerSum> exact;
    /// g(x, 0) = 0 and g monotone in u.
    bool assumption_a = true;
    /// Sobolev index of the data used by the rate predictor; empty when no
    /// rate is claimed.
    std::optional<double> data_regularity;

    [[nodiscard]] double f(double x) const {
        double v = rhs_fractional(x);
        if (rhs_extra) {
            v += rhs_extra(x);
        }
        return v;
    }

    [[nodiscard]] bool is_linear_zero() const { return !g; }
};

/// 50 Chebyshev points mapped into (0, 1).
inline std::vector<double> chebyshev_samples(int n = 50) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        xs.push_back(0.5 * (1.0 - std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n))));
    }
    return xs;
}

struct ConsistencyReport {
    double max_residual = 0.0;
    double worst_x = 0.0;
};

/// Residual -D^s u + g(x, u) - f of the attached exact solution, scaled by
/// max(1, |f(x)|), at Chebyshev samples.
inline ConsistencyReport manufactured_residual(const Problem& p, int samples = 50) {
    if (!p.exact) {
        throw DomainError("manufactured_residual: problem '" + p.name + "' has no exact solution");
    }
    const PowerSum minus_ds = -1.0 * powersum_derivative(*p.exact, p.s.value(), p.kind);
    ConsistencyReport rep;
    for (double x : chebyshev_samples(samples)) {
        const double u = (*p.exact)(x);
        const double gv = p.g ? p.g(x, u) : 0.0;
        const double fx = p.f(x);
        const double r = std::abs(minus_ds(x) + gv - fx) / std::max(1.0, std::abs(fx));
        if (!(r <= rep.max_residual)) {
            rep.max_residual = r;
            rep.worst_x = x;
        }
    }
    return rep;
}

inline void check_consistency(const Problem& p, double tol = 1e-9) {
    if (!p.exact) {
        return;
    }
    const PowerSum& u = *p.exact;
    if (u(0.0) != 0.0 || std::abs(u(1.0)) > 1e-12) {
        throw ConsistencyError("problem '" + p.name + "': exact solution does not vanish at the boundary");
    }
    const ConsistencyReport rep = manufactured_residual(p);
    if (!(rep.max_residual <= tol)) {
        std::ostringstream msg;
        msg << "problem '" << p.name << "': manufactured residual " << rep.max_residual << " at x = " << rep.worst_x
            << " exceeds " << tol;
        throw ConsistencyError(msg.str());
    }
}

namespace detail {

inline Problem manufactured(std::string name, DerivativeKind kind, FracOrder s, Nonlinearity g, Nonlinearity g_u,
                            PowerSum exact, PowerSum rhs_fractional, bool assumption_a,
                            std::optional<double> regularity) {
    Problem p;
    p.name = std::move(name);
    p.kind = kind;
    p.s = s;
    p.exact = std::move(exact);
    p.rhs_fractional = std::move(rhs_fractional);
    if (g) {
        const PowerSum u = *p.exact;
        p.rhs_extra = [g, u](double x) { return g(x, u(x)); };
    }
    p.g = std::move(g);
    p.g_u = std::move(g_u);
    p.assumption_a = assumption_a;
    p.data_regularity = regularity;
    check_consistency(p);
    return p;
}

inline void require_kind(const std::string& name, DerivativeKind kind, DerivativeKind allowed) {
    if (kind != allowed) {
        throw ConfigError(name + " is only defined for the " + to_string(allowed) + " derivative");
    }
}

} // namespace detail

/// g = 3 x u^3.
inline Problem example1(FracOrder s, DerivativeKind kind) {
    const double sv = s.value();
    const double c = reciprocal_gamma(sv + 1.0);
    const double lead = kind == DerivativeKind::Caputo ? 1.0 : sv - 1.0;
    PowerSum exact({{c, lead}, {-c, sv}});
    return detail::manufactured(
        "example1", kind, s, [](double x, double u) { return 3.0 * x * u * u * u; },
        [](double x, double u) { return 9.0 * x * u * u; }, std::move(exact), PowerSum::monomial(1.0, 0.0), true,
        0.0);
}

/// g = sin(x) u^5.
inline Problem example2(FracOrder s, DerivativeKind kind) {
    const double sv = s.value();
    const double c = gamma_ratio(1.5, sv + 1.5);
    const double lead = kind == DerivativeKind::Caputo ? 1.0 : sv - 1.0;
    PowerSum exact({{c, lead}, {-c, sv + 0.5}});
    return detail::manufactured(
        "example2", kind, s, [](double x, double u) { return std::sin(x) * std::pow(u, 5); },
        [](double x, double u) { return 5.0 * std::sin(x) * std::pow(u, 4); }, std::move(exact),
        PowerSum::monomial(1.0, 0.5), true, 0.0);
}

/// g = x exp(u); Riemann-Liouville only. g(x, 0) = x, so no rate is claimed.
inline Problem example3(FracOrder s, DerivativeKind kind = DerivativeKind::RiemannLiouville) {
    detail::require_kind("example3", kind, DerivativeKind::RiemannLiouville);
    const double sv = s.value();
    const double a = reciprocal_gamma(sv + 2.0);
    const double b = 2.0 * reciprocal_gamma(sv + 3.0);
    PowerSum exact = PowerSum({{a, sv - 1.0}, {-a, sv + 1.0}, {-b, sv - 1.0}, {b, sv + 2.0}}).pinned_zero_at_one();
    return detail::manufactured(
        "example3", kind, s, [](double x, double u) { return x * std::exp(u); },
        [](double x, double u) { return x * std::exp(u); }, std::move(exact), PowerSum({{1.0, 1.0}, {-1.0, 2.0}}),
        false, std::nullopt);
}

/// g = (u - x)^2; Caputo only. Not monotone, so no rate is claimed.
inline Problem example4(FracOrder s, DerivativeKind kind = DerivativeKind::Caputo) {
    detail::require_kind("example4", kind, DerivativeKind::Caputo);
    const double sv = s.value();
    if (!(sv - 0.25 > 1.0)) {
        throw DomainError("example4: needs s > 5/4 so that x^{s-1/4} has a Caputo derivative");
    }
    const double c = gamma_ratio(0.75, sv + 0.75);
    PowerSum exact({{c, 1.0}, {-c, sv - 0.25}});
    auto rhs = PowerSum::monomial(1.0, -0.25);
    return detail::manufactured(
        "example4", kind, s, [](double x, double u) { return (u - x) * (u - x); },
        [](double x, double u) { return 2.0 * (u - x); }, std::move(exact), std::move(rhs), false, std::nullopt);
}

/// Linear problem g = 0, f = x^theta. The Riemann-Liouville solution is
/// c (x^{s-1} - x^{s+theta}); the Caputo one is c (x - x^{s+theta}), which
/// degenerates when s + theta <= 1.
inline Problem example5(FracOrder s, DerivativeKind kind, double theta) {
    if (!(theta > -0.5 && theta < 0.0)) {
        throw DomainError("example5: theta must lie in (-1/2, 0)");
    }
    const double sv = s.value();
    if (kind == DerivativeKind::Caputo && !(sv + theta > 1.0 + 1e-12)) {
        throw DomainError("example5: Caputo case needs s + theta > 1 (the exact solution vanishes otherwise)");
    }
    const double c = gamma_ratio(theta + 1.0, sv + theta + 1.0);
    const double lead = kind == DerivativeKind::Caputo ? 1.0 : sv - 1.0;
    PowerSum exact({{c, lead}, {-c, sv + theta}});
    return detail::manufactured("example5", kind, s, nullptr, nullptr, std::move(exact),
                                PowerSum::monomial(1.0, theta), true, theta + 0.5);
}

/// Names accepted by make_problem.
inline const std::vector<std::string>& registry_names() {
    static const std::vector<std::string> names{"example1", "example2", "example3", "example4", "example5"};
    return names;
}

/// Derivative kinds each registry entry admits.
inline std::vector<DerivativeKind> admissible_kinds(const std::string& name) {
    if (name == "example3") {
        return {DerivativeKind::RiemannLiouville};
    }
    if (name == "example4") {
        return {DerivativeKind::Caputo};
    }
    if (name == "example1" || name == "example2" || name == "example5") {
        return {DerivativeKind::RiemannLiouville, DerivativeKind::Caputo};
    }
    throw ConfigError("unknown problem '" + name + "'");
}

inline Problem make_problem(const std::string& name, FracOrder s, DerivativeKind kind, double theta = -0.2) {
    if (name == "example1") {
        return example1(s, kind);
    }
    if (name == "example2") {
        return example2(s, kind);
    }
    if (name == "example3") {
        return example3(s, kind);
    }
    if (name == "example4") {
        return example4(s, kind);
    }
    if (name == "example5") {
        return example5(s, kind, theta);
    }
    throw ConfigError("unknown problem '" + name + "'");
}

/// g(x, u) = coefficient * X(x) * U(u) with X in {x^a, sin x} and
/// U in {u^m (integer m >= 1), exp u}.
struct CustomSpec {
    enum class XFactor { Power, Sin };
    enum class UFactor { Power, Exp };

    std::string name = "custom";
    DerivativeKind kind = DerivativeKind::RiemannLiouville;
    double s = 1.5;
    double coefficient = 0.0;
    XFactor x_factor = XFactor::Power;
    double x_power = 0.0;
    UFactor u_factor = UFactor::Power;
    int u_power = 1;
    PowerSum exact;
    /// Fractional part of f; derived from the exact solution when empty.
    std::optional<PowerSum> rhs_fractional;
};

inline Problem custom_problem(const CustomSpec& spec) {
    const FracOrder s(spec.s);
    if (spec.exact.empty()) {
        throw DomainError("custom_problem: an exact solution is required");
    }
    if (spec.u_factor == CustomSpec::UFactor::Power && spec.u_power < 1) {
        throw DomainError("custom_problem: u exponent must be a positive integer");
    }
    if (spec.x_factor == CustomSpec::XFactor::Power && !(spec.x_power >= 0.0)) {
        throw DomainError("custom_problem: x exponent must be non-negative");
    }
    const double c = spec.coefficient;
    const auto xf = spec.x_factor;
    const double a = spec.x_power;
    const auto X = [xf, a](double x) { return xf == CustomSpec::XFactor::Sin ? std::sin(x) : std::pow(x, a); };
    const auto uf = spec.u_factor;
    const int m = spec.u_power;

    Nonlinearity g;
    Nonlinearity g_u;
    if (c != 0.0) {
        if (uf == CustomSpec::UFactor::Exp) {
            g = [c, X](double x, double u) { return c * X(x) * std::exp(u); };
            g_u = g;
        } else {
            g = [c, X, m](double x, double u) { return c * X(x) * std::pow(u, m); };
            g_u = [c, X, m](double x, double u) { return c * m * X(x) * std::pow(u, m - 1); };
        }
    }
    const bool monotone = c == 0.0 || (uf == CustomSpec::UFactor::Power && m % 2 == 1 && c > 0.0);
    PowerSum rhs = spec.rhs_fractional ? *spec.rhs_fractional
                                       : -1.0 * powersum_derivative(spec.exact, s.value(), spec.kind);
    return detail::manufactured(spec.name, spec.kind, s, std::move(g), std::move(g_u), spec.exact, std::move(rhs),
                                monotone, monotone ? std::optional<double>(0.0) : std::nullopt);
}

} // namespace fracfem
