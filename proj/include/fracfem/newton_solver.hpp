#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/assembly.hpp"
#include "fracfem/errors.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/linear_algebra.hpp"

namespace fracfem {

struct NewtonConfig {
    int max_iters = 30;
    /// Stop when ||r||_2 <= residual_tol * ||F||_2.
    double residual_tol = 1e-12;
    /// Allow step halving when the residual grows.
    bool damping = true;
    double min_damping = 1.0 / 16.0;
    /// Start from the nodal interpolant of this function; zero when empty.
    std::function<double(double)> initial_guess;

    void validate() const {
        if (max_iters < 1) {
            throw ConfigError("NewtonConfig: max_iters must be at least 1");
        }
        if (!(residual_tol > 0.0)) {
            throw ConfigError("NewtonConfig: residual tolerance must be positive");
        }
        if (!(min_damping > 0.0 && min_damping <= 1.0)) {
            throw ConfigError("NewtonConfig: minimum damping must lie in (0, 1]");
        }
    }
};

enum class SolveStatus { Converged, MaxIterations, Diverged, SingularJacobian };

inline std::string to_string(SolveStatus st) {
    switch (st) {
    case SolveStatus::Converged:
        return "converged";
    case SolveStatus::MaxIterations:
        return "max-iterations";
    case SolveStatus::Diverged:
        return "diverged";
    case SolveStatus::SingularJacobian:
        return "singular-jacobian";
    }
    return "unknown";
}

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    bool damping_used = false;
    /// Absolute tolerance actually applied (relative target or roundoff floor).
    double tolerance = 0.0;
    std::string message;
};

struct SolveResult {
    FEFunction solution;
    SolveReport report;
};

/// r = F - A c - B(u_h).
inline std::vector<double> residual(const FEFunction& u_h, const DiscreteSystem& sys) {
    const auto c = u_h.coefficients();
    std::vector<double> r = sys.load;
    const auto ac = sys.stiffness.multiply(c);
    const auto b = assemble_nonlinear(u_h, sys.problem, sys.quadrature, sys.test_space());
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] -= ac[k] + b[k];
    }
    return r;
}

namespace detail {

// Residual level that roundoff alone produces when evaluating F - A c - B.
inline double roundoff_floor(const DiscreteSystem& sys, std::span<const double> c) {
    const double n = std::max(1, sys.size());
    const double scale = sys.stiffness.norm_inf() * norm_inf(c) + norm_inf(sys.load);
    return 64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(n) * scale;
}

} // namespace detail

/// Newton iteration on the discrete system. Failures are reported in the
/// SolveReport, never thrown.
inline SolveResult newton_solve(const DiscreteSystem& sys, const NewtonConfig& cfg = {}) {
    cfg.validate();
    const UniformMesh& mesh = sys.mesh();
    FEFunction u = cfg.initial_guess ? interpolate(cfg.initial_guess, sys.basis) : FEFunction(mesh);
    SolveReport rep;
    const double target = cfg.residual_tol * norm2(sys.load);

    auto r = residual(u, sys);
    double rn = norm2(r);
    rep.residual_history.push_back(rn);
    auto tol_now = [&] { return std::max(target, detail::roundoff_floor(sys, u.coefficients())); };
    rep.tolerance = tol_now();
    int growth_at_min = 0;

    while (!(rn <= rep.tolerance)) {
        if (rep.iterations >= cfg.max_iters) {
            rep.status = SolveStatus::MaxIterations;
            rep.message = "no convergence after " + std::to_string(cfg.max_iters) + " iterations";
            return {std::move(u), std::move(rep)};
        }
        std::vector<double> delta;
        try {
            const DenseMatrix jac = assemble_jacobian(u, sys.problem, sys.stiffness, sys.quadrature, sys.test_space());
            delta = lu_solve(jac, r);
        } catch (const SingularMatrixError& e) {
            rep.status = SolveStatus::SingularJacobian;
            rep.message = "iteration " + std::to_string(rep.iterations + 1) + ": " + e.what();
            return {std::move(u), std::move(rep)};
        }
        ++rep.iterations;

        double lambda = 1.0;
        FEFunction trial(mesh);
        std::vector<double> r_trial;
        double rn_trial = 0.0;
        for (;;) {
            std::vector<double> c(u.coefficients().begin(), u.coefficients().end());
            for (std::size_t k = 0; k < c.size(); ++k) {
                c[k] += lambda * delta[k];
            }
            trial = FEFunction(mesh, std::move(c));
            r_trial = residual(trial, sys);
            rn_trial = norm2(r_trial);
            if (!cfg.damping || rn_trial < rn || lambda <= cfg.min_damping) {
                break;
            }
            lambda *= 0.5;
            rep.damping_used = true;
        }
        if (!std::isfinite(rn_trial)) {
            rep.status = SolveStatus::Diverged;
            rep.message = "iteration " + std::to_string(rep.iterations) + ": non-finite residual";
            return {std::move(u), std::move(rep)};
        }
        const bool grew = rn_trial >= rn;
        growth_at_min = (grew && (lambda <= cfg.min_damping || !cfg.damping)) ? growth_at_min + 1 : 0;
        u = std::move(trial);
        r = std::move(r_trial);
        rn = rn_trial;
        rep.residual_history.push_back(rn);
        rep.tolerance = tol_now();
        if (growth_at_min >= 3 && !(rn <= rep.tolerance)) {
            rep.status = SolveStatus::Diverged;
            rep.message = "residual grew over 3 consecutive steps at minimum damping";
            return {std::move(u), std::move(rep)};
        }
    }
    rep.converged = true;
    rep.status = SolveStatus::Converged;
    return {std::move(u), std::move(rep)};
}

} // namespace fracfem
