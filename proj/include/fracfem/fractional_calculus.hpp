#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fracfem/errors.hpp"
#include "fracfem/power_sum.hpp"
#include "fracfem/quadrature.hpp"
#include "fracfem/special_functions.hpp"

namespace fracfem {

enum class DerivativeKind { RiemannLiouville, Caputo };

inline std::string to_string(DerivativeKind kind) {
    return kind == DerivativeKind::Caputo ? "caputo" : "rl";
}

inline DerivativeKind parse_kind(const std::string& text) {
    if (text == "rl" || text == "RL" || text == "riemann-liouville") {
        return DerivativeKind::RiemannLiouville;
    }
    if (text == "caputo" || text == "Caputo") {
        return DerivativeKind::Caputo;
    }
    throw DomainError("unknown derivative kind '" + text + "' (expected rl or caputo)");
}

/// Order s of the boundary value problem, 1 < s < 2.
class FracOrder {
public:
    explicit FracOrder(double s) : s_(s) {
        if (!(s > 1.0 && s < 2.0)) {
            std::ostringstream msg;
            msg << "FracOrder: s = " << s << " outside (1, 2)";
            throw DomainError(msg.str());
        }
    }
    [[nodiscard]] double value() const { return s_; }
    /// Order of the half derivatives in the bilinear form, in (1/2, 1).
    [[nodiscard]] double half() const { return 0.5 * s_; }

private:
    double s_;
};

namespace detail {

inline void require_unit_point(double x, const char* where) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(where) + ": point outside [0, 1]");
    }
}

inline void require_integrable(double p, const char* where) {
    if (!(p > -1.0)) {
        throw DomainError(std::string(where) + ": exponent must exceed -1 (not integrable)");
    }
}

inline bool same_exponent(double a, double b) { return std::abs(a - b) <= 1e-13; }

} // namespace detail

/// Left Riemann-Liouville integral of x^p: Gamma(p+1)/Gamma(p+1+sigma) x^{p+sigma}.
inline double rl_integral_power(double p, double sigma, double x) {
    detail::require_integrable(p, "rl_integral_power");
    detail::require_unit_point(x, "rl_integral_power");
    if (!(sigma > 0.0)) {
        throw DomainError("rl_integral_power: order must be positive");
    }
    return gamma_ratio(p + 1.0, p + 1.0 + sigma) * std::pow(x, p + sigma);
}

/// Left Riemann-Liouville derivative of x^p of order in (0, 2).
///
/// The coefficient uses 1/Gamma(p+1-order), so terms sitting on a pole (for
/// example x^{s-1} under D^s) give exactly zero.
inline double rl_derivative_power(double p, double order, double x) {
    detail::require_integrable(p, "rl_derivative_power");
    detail::require_unit_point(x, "rl_derivative_power");
    if (!(order > 0.0 && order < 2.0)) {
        throw DomainError("rl_derivative_power: order must lie in (0, 2)");
    }
    if (x == 0.0 && p < order) {
        throw DomainError("rl_derivative_power: singular at x = 0 for exponent below the order");
    }
    const double c = gamma_ratio(p + 1.0, p + 1.0 - order);
    if (c == 0.0) {
        return 0.0;
    }
    return c * std::pow(x, p - order);
}

/// Left Caputo derivative of x^p of order s in (1, 2), i.e. I^{2-s} D^2 x^p.
/// Affine terms (p = 0, 1) vanish; non-integer p must exceed 1.
inline double caputo_derivative_power(double p, double s, double x) {
    detail::require_unit_point(x, "caputo_derivative_power");
    if (!(s > 1.0 && s < 2.0)) {
        throw DomainError("caputo_derivative_power: order must lie in (1, 2)");
    }
    if (detail::same_exponent(p, 0.0) || detail::same_exponent(p, 1.0)) {
        return 0.0;
    }
    if (!(p > 1.0)) {
        throw DomainError("caputo_derivative_power: exponent must be 0, 1 or greater than 1");
    }
    if (x == 0.0 && p < s) {
        throw DomainError("caputo_derivative_power: singular at x = 0 for exponent below the order");
    }
    return gamma_ratio(p + 1.0, p + 1.0 - s) * std::pow(x, p - s);
}

/// Termwise left Riemann-Liouville integral.
inline PowerSum powersum_rl_integral(const PowerSum& u, double sigma) {
    if (!(sigma > 0.0)) {
        throw DomainError("powersum_rl_integral: order must be positive");
    }
    std::vector<PowerTerm> out;
    for (const auto& t : u.terms()) {
        out.push_back({t.coefficient * gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 + sigma),
                       t.exponent + sigma});
    }
    return PowerSum(std::move(out));
}

/// Termwise left Riemann-Liouville derivative; annihilated terms are dropped.
inline PowerSum powersum_rl_derivative(const PowerSum& u, double order) {
    if (!(order > 0.0 && order < 2.0)) {
        throw DomainError("powersum_rl_derivative: order must lie in (0, 2)");
    }
    std::vector<PowerTerm> out;
    for (const auto& t : u.terms()) {
        const double c = gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 - order);
        if (c != 0.0) {
            out.push_back({t.coefficient * c, t.exponent - order});
        }
    }
    return PowerSum(std::move(out));
}

/// Termwise left Caputo derivative of order s in (1, 2).
inline PowerSum powersum_caputo_derivative(const PowerSum& u, double s) {
    if (!(s > 1.0 && s < 2.0)) {
        throw DomainError("powersum_caputo_derivative: order must lie in (1, 2)");
    }
    std::vector<PowerTerm> out;
    for (const auto& t : u.terms()) {
        const double p = t.exponent;
        if (detail::same_exponent(p, 0.0) || detail::same_exponent(p, 1.0)) {
            continue;
        }
        if (!(p > 1.0)) {
            throw DomainError("powersum_caputo_derivative: exponent must be 0, 1 or greater than 1");
        }
        out.push_back({t.coefficient * gamma_ratio(p + 1.0, p + 1.0 - s), p - s});
    }
    return PowerSum(std::move(out));
}

/// Derivative of order s of the given kind.
inline PowerSum powersum_derivative(const PowerSum& u, double s, DerivativeKind kind) {
    return kind == DerivativeKind::Caputo ? powersum_caputo_derivative(u, s) : powersum_rl_derivative(u, s);
}

// ---------------------------------------------------------------------------
// Abel-quadrature oracle
// ---------------------------------------------------------------------------

struct OracleSettings {
    int order = 16;
    double grading_ratio = 0.15;
    int grading_levels = 80;
    double tolerance = 1e-10;
};

namespace detail {

// (1/Gamma(alpha)) int_0^x (x-t)^{alpha-1} f(t) dt with one fixed rule.
//
// Works in the scale-free variable tau = t/x, so the plan does not depend on
// the size of x. Pieces in [0, 1/2] are integrated in tau, graded toward 0
// where f may carry an algebraic singularity. Pieces in [1/2, 1] use
// omega = (1-tau)^alpha, which turns the kernel into a constant.
inline double abel_left_once(const std::function<double(double)>& f, double alpha, double x,
                             std::span<const double> breakpoints, int order, double ratio, int levels) {
    if (x == 0.0) {
        return 0.0;
    }
    std::vector<double> pts{0.0, 0.5, 1.0};
    for (double b : breakpoints) {
        if (b > 0.0 && b < x) {
            pts.push_back(b / x);
        }
    }
    pts = CompositePlan::dedup(std::move(pts));
    const GaussRule rule = gauss_rule(order);

    double lower = 0.0;
    {
        std::vector<double> bp;
        for (double p : pts) {
            if (p <= 0.5) {
                bp.push_back(p);
            }
        }
        CompositePlan plan(bp, {0.0}, ratio, levels, rule);
        lower = integrate([&](double tau) { return std::pow(1.0 - tau, alpha - 1.0) * f(x * tau); }, plan);
    }
    double upper = 0.0;
    {
        std::vector<double> wp;
        for (double p : pts) {
            if (p >= 0.5) {
                wp.push_back(std::pow(1.0 - p, alpha));
            }
        }
        // graded at both ends: omega^{1/alpha} varies fast near the top for small alpha
        CompositePlan plan(wp, {0.0, wp.front()}, ratio, levels, rule);
        const double inv = 1.0 / alpha;
        upper = inv * integrate([&](double w) { return f(x * (1.0 - std::pow(w, inv))); }, plan);
    }
    return std::pow(x, alpha) * (lower + upper) * reciprocal_gamma(alpha);
}

inline double abel_left_checked(const std::function<double(double)>& f, double alpha, double x,
                                std::span<const double> breakpoints, const OracleSettings& cfg) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("abel oracle: kernel order must lie in (0, 1]");
    }
    const double coarse =
        abel_left_once(f, alpha, x, breakpoints, cfg.order, cfg.grading_ratio, cfg.grading_levels);
    const double fine = abel_left_once(f, alpha, x, breakpoints, cfg.order + 8, cfg.grading_ratio,
                                       cfg.grading_levels + 8);
    if (!(std::abs(fine - coarse) <= cfg.tolerance * std::max(1.0, std::abs(fine)))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "abel oracle: no convergence under refinement at x = " << x << " (" << coarse << " vs "
            << fine << ")";
        throw QuadratureError(msg.str());
    }
    return fine;
}

} // namespace detail

/// Left Abel integral (1/Gamma(alpha)) int_0^x (x-t)^{alpha-1} f(t) dt, alpha in (0, 1].
inline double abel_integral_left(const std::function<double(double)>& f, double alpha, double x,
                                 std::span<const double> breakpoints = {}, const OracleSettings& cfg = {}) {
    detail::require_unit_point(x, "abel_integral_left");
    return detail::abel_left_checked(f, alpha, x, breakpoints, cfg);
}

/// Right Abel integral (1/Gamma(alpha)) int_x^1 (t-x)^{alpha-1} f(t) dt, alpha in (0, 1].
inline double abel_integral_right(const std::function<double(double)>& f, double alpha, double x,
                                  std::span<const double> breakpoints = {}, const OracleSettings& cfg = {}) {
    detail::require_unit_point(x, "abel_integral_right");
    std::vector<double> mirrored;
    mirrored.reserve(breakpoints.size());
    for (double b : breakpoints) {
        mirrored.push_back(1.0 - b);
    }
    return detail::abel_left_checked([&](double t) { return f(1.0 - t); }, alpha, 1.0 - x, mirrored, cfg);
}

/// Right Abel integral of f supplied through its reflection r(tau) = f(1 - tau).
/// Needed when f is singular at 1, where 1 - tau rounds to 1 for tiny tau.
inline double abel_integral_right_reflected(const std::function<double(double)>& r, double alpha, double x,
                                            std::span<const double> reflected_breakpoints = {},
                                            const OracleSettings& cfg = {}) {
    detail::require_unit_point(x, "abel_integral_right_reflected");
    return detail::abel_left_checked(r, alpha, 1.0 - x, reflected_breakpoints, cfg);
}

/// Oracle for the left Riemann-Liouville derivative of order sigma in (0, 1)
/// of a function vanishing at 0, evaluated as I^{1-sigma} f' by quadrature.
/// `breakpoints` lists the points where f' is discontinuous.
inline double abel_oracle(const std::function<double(double)>& fprime, double sigma, double x,
                          std::span<const double> breakpoints = {}, const OracleSettings& cfg = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw DomainError("abel_oracle: order must lie in (0, 1)");
    }
    return abel_integral_left(fprime, 1.0 - sigma, x, breakpoints, cfg);
}

/// Right-sided counterpart: the derivative of order sigma of a function
/// vanishing at 1 equals -xI1^{1-sigma} f'.
inline double abel_oracle_right(const std::function<double(double)>& fprime, double sigma, double x,
                                std::span<const double> breakpoints = {}, const OracleSettings& cfg = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw DomainError("abel_oracle_right: order must lie in (0, 1)");
    }
    return -abel_integral_right(fprime, 1.0 - sigma, x, breakpoints, cfg);
}

} // namespace fracfem
