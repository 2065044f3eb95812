#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracfem/assembly.hpp"
#include "fracfem/errors.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/frac_operators.hpp"
#include "fracfem/power_sum.hpp"
#include "fracfem/problem.hpp"
#include "fracfem/quadrature.hpp"

namespace fracfem {

/// ||u - u_h||_{L^2(0,1)}, split at the mesh nodes and graded at both ends.
inline double l2_error(const FEFunction& u_h, const PowerSum& exact, const QuadratureSettings& settings = {}) {
    const UniformMesh& mesh = u_h.mesh();
    const CompositePlan plan = plan_for_pair(mesh.nodes(), {}, std::vector<double>{0.0, 1.0}, settings);
    const double sq = integrate(
        [&](double x) {
            const double e = exact(x) - u_h(x);
            return e * e;
        },
        plan);
    return std::sqrt(sq);
}

/// ||D^{s/2}(u - u_h)||_{L^2(0,1)} with the left Riemann-Liouville half
/// derivative. D^{s/2} u_h has an algebraic kink at every node, so every node
/// is graded.
inline double hs2_error(const FEFunction& u_h, const PowerSum& exact, FracOrder s,
                        const QuadratureSettings& settings = {}) {
    const UniformMesh& mesh = u_h.mesh();
    const auto nodes = mesh.nodes();
    const CompositePlan plan = plan_for_pair(nodes, {}, nodes, settings);
    const PowerSum du = left_halfderiv_powersum(exact, s);
    const FEHalfDerivative duh(u_h, s);
    const double sq = integrate(
        [&](double x) {
            const double e = du(x) - duh(x);
            return e * e;
        },
        plan);
    return std::sqrt(sq);
}

/// Predicted H^{s/2} rate: gamma - s/2 with gamma = s - 1/2 for
/// Riemann-Liouville and gamma = min(alpha + s, 2) for Caputo with data in H^alpha.
inline double theoretical_rate(DerivativeKind kind, FracOrder s, double alpha = 0.0) {
    if (!(alpha >= 0.0 && alpha < 0.5)) {
        throw DomainError("theoretical_rate: data regularity must lie in [0, 1/2)");
    }
    const double sv = s.value();
    const double gamma = kind == DerivativeKind::Caputo ? std::min(alpha + sv, 2.0) : sv - 0.5;
    return gamma - 0.5 * sv;
}

/// Rate claimed for a registry problem, if any.
inline std::optional<double> theoretical_rate(const Problem& p) {
    if (!p.data_regularity) {
        return std::nullopt;
    }
    return theoretical_rate(p.kind, p.s, *p.data_regularity);
}

struct RateSummary {
    /// log2(e_k / e_{k+1}) for consecutive levels.
    std::vector<double> successive;
    /// Last successive rate; the single reported rate.
    double final_rate = 0.0;
    /// Least-squares slope of -log2(e) against level index.
    double fitted_rate = 0.0;
};

/// Rates for errors on meshes that halve from one level to the next.
inline RateSummary rate_table(std::span<const double> errors) {
    if (errors.size() < 2) {
        throw DomainError("rate_table: need at least two levels");
    }
    for (double e : errors) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw DomainError("rate_table: errors must be positive and finite");
        }
    }
    RateSummary out;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        out.successive.push_back(std::log2(errors[k] / errors[k + 1]));
    }
    out.final_rate = out.successive.back();
    const double n = static_cast<double>(errors.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        const double x = static_cast<double>(k);
        const double y = -std::log2(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.fitted_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

struct ConvergenceRow {
    int k = 0;
    double h = 0.0;
    int n_cells = 0;
    double err_l2 = 0.0;
    double err_hs2 = 0.0;
    int newton_iters = 0;
    bool converged = true;
    std::string status = "converged";

    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

/// One refinement study for a fixed (problem, kind, s).
struct ConvergenceReport {
    std::string problem;
    DerivativeKind kind = DerivativeKind::RiemannLiouville;
    double s = 0.0;
    std::optional<double> theta;
    std::vector<ConvergenceRow> rows;
    std::optional<double> theoretical_rate;

    friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;

    [[nodiscard]] bool all_converged() const {
        for (const auto& r : rows) {
            if (!r.converged) {
                return false;
            }
        }
        return true;
    }

    /// Rate of row i relative to row i - 1; empty for the first row or when
    /// either error is unusable.
    [[nodiscard]] std::optional<double> rate_l2(std::size_t i) const { return rate_at(i, &ConvergenceRow::err_l2); }
    [[nodiscard]] std::optional<double> rate_hs2(std::size_t i) const { return rate_at(i, &ConvergenceRow::err_hs2); }

    [[nodiscard]] std::optional<RateSummary> summary_l2() const { return summary(&ConvergenceRow::err_l2); }
    [[nodiscard]] std::optional<RateSummary> summary_hs2() const { return summary(&ConvergenceRow::err_hs2); }

private:
    [[nodiscard]] std::optional<double> rate_at(std::size_t i, double ConvergenceRow::*field) const {
        if (i == 0 || i >= rows.size()) {
            return std::nullopt;
        }
        const double a = rows[i - 1].*field;
        const double b = rows[i].*field;
        if (!(a > 0.0 && b > 0.0) || !rows[i - 1].converged || !rows[i].converged) {
            return std::nullopt;
        }
        return std::log2(a / b);
    }

    [[nodiscard]] std::optional<RateSummary> summary(double ConvergenceRow::*field) const {
        std::vector<double> e;
        for (const auto& r : rows) {
            if (!r.converged || !(r.*field > 0.0)) {
                return std::nullopt;
            }
            e.push_back(r.*field);
        }
        if (e.size() < 2) {
            return std::nullopt;
        }
        return rate_table(e);
    }
};

} // namespace fracfem
