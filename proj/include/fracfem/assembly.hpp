#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/errors.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/frac_operators.hpp"
#include "fracfem/linear_algebra.hpp"
#include "fracfem/problem.hpp"
#include "fracfem/quadrature.hpp"

namespace fracfem {

struct QuadPoint {
    double x = 0.0;
    double w = 0.0;
};

/// Quadrature points grouped by mesh cell: cells[m - 1] holds the points of
/// [x_{m-1}, x_m]. Pieces touching 0, 1 or any extra singular point are graded.
struct CellQuadrature {
    UniformMesh mesh{1};
    std::vector<std::vector<QuadPoint>> cells;

    [[nodiscard]] std::span<const QuadPoint> cell(int m) const { return cells.at(static_cast<std::size_t>(m - 1)); }
};

inline CellQuadrature cell_quadrature(const UniformMesh& mesh, std::span<const double> extra_singular,
                                      const QuadratureSettings& settings) {
    std::vector<double> singular{0.0, 1.0};
    singular.insert(singular.end(), extra_singular.begin(), extra_singular.end());
    const auto nodes = mesh.nodes();
    const CompositePlan plan = plan_for_pair(nodes, {}, singular, settings);
    CellQuadrature cq;
    cq.mesh = mesh;
    cq.cells.resize(static_cast<std::size_t>(mesh.n_cells()));
    const GaussRule& rule = plan.rule();
    for (const Interval& piece : plan.pieces()) {
        const double mid = 0.5 * (piece.lo + piece.hi);
        const double half = 0.5 * (piece.hi - piece.lo);
        auto& bucket = cq.cells[static_cast<std::size_t>(mesh.cell_of(mid) - 1)];
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            bucket.push_back({mid + half * rule.nodes[q], half * rule.weights[q]});
        }
    }
    return cq;
}

// ---------------------------------------------------------------------------
// Stiffness
// ---------------------------------------------------------------------------

/// -int_0^1 D^{s/2} phi_i(x) * xD^{s/2} phi_j(x) dx, split and graded at every
/// kink of both profiles. Zero when j < i - 1 (disjoint supports of the two
/// profiles).
inline double stiffness_entry(const UniformMesh& mesh, FracOrder s, int j, int i,
                              const QuadratureSettings& settings = {}) {
    if (j < i - 1) {
        return 0.0;
    }
    const double lo = mesh.node(i - 1);
    const double hi = mesh.node(j + 1);
    std::vector<double> kinks;
    for (int k : {i - 1, i, i + 1, j - 1, j, j + 1}) {
        const double x = mesh.node(k);
        if (x >= lo && x <= hi) {
            kinks.push_back(x);
        }
    }
    kinks = CompositePlan::dedup(std::move(kinks));
    CompositePlan plan(kinks, kinks, settings.for_stiffness());
    const double v = integrate(
        [&](double x) { return left_halfderiv_hat(mesh, i, s, x) * right_halfderiv_hat(mesh, j, s, x); }, plan);
    return -v;
}

/// Stiffness matrix with entry (j - 1, i - 1) = A(phi_i, test_j). The uniform
/// mesh makes it Toeplitz, so each diagonal is integrated once. The Caputo
/// test corrections contribute nothing to it, so both kinds share the matrix.
inline DenseMatrix assemble_stiffness(const HatBasis& basis, FracOrder s, DerivativeKind /*kind*/,
                                      const QuadratureSettings& settings = {}) {
    const UniformMesh& mesh = basis.mesh();
    const int n = basis.size();
    DenseMatrix a(n);
    if (n == 0) {
        return a;
    }
    // offset d = i - j runs over 1, 0, -1, ..., -(n - 1)
    std::vector<double> diag(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d >= -(n - 1); --d) {
        if (d == 1 && n < 2) {
            continue;
        }
        const int i = d == 1 ? 2 : 1;
        const int j = i - d;
        const double v = stiffness_entry(mesh, s, j, i, settings);
        if (!std::isfinite(v)) {
            throw QuadratureError("assemble_stiffness: non-finite entry at (j, i) = (" + std::to_string(j) + ", " +
                                  std::to_string(i) + ")");
        }
        diag[static_cast<std::size_t>(1 - d)] = v;
    }
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= std::min(n, j + 1); ++i) {
            a(j - 1, i - 1) = diag[static_cast<std::size_t>(1 - (i - j))];
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Load, nonlinear term, Jacobian
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double checked_value(F&& f, double x, const char* what) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": non-finite value at x = " << x;
        throw QuadratureError(msg.str());
    }
    return v;
}

// v_j = int w(x) phi_j(x) dx, then v_j -= gamma_j int w(x) (1-x)^{s-1} dx for
// Caputo tests.
template <class W>
std::vector<double> tested_vector(W&& weight, const CellQuadrature& cq, const CaputoTestSpace* caputo,
                                  const char* what) {
    const UniformMesh& mesh = cq.mesh;
    const int n_cells = mesh.n_cells();
    const int n = mesh.n_interior();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const double inv_h = n_cells;
    double corr = 0.0;
    const double sm1 = caputo != nullptr ? caputo->order().value() - 1.0 : 0.0;
    for (int m = 1; m <= n_cells; ++m) {
        const double xl = mesh.node(m - 1);
        for (const QuadPoint& q : cq.cell(m)) {
            const double v = checked_value(weight, q.x, what) * q.w;
            const double t = (q.x - xl) * inv_h;
            if (m - 1 >= 1) {
                out[static_cast<std::size_t>(m - 2)] += v * (1.0 - t);
            }
            if (m <= n) {
                out[static_cast<std::size_t>(m - 1)] += v * t;
            }
            if (caputo != nullptr) {
                corr += v * std::pow(1.0 - q.x, sm1);
            }
        }
    }
    if (caputo != nullptr) {
        for (int j = 1; j <= n; ++j) {
            out[static_cast<std::size_t>(j - 1)] -= caputo->gamma(j) * corr;
        }
    }
    return out;
}

} // namespace detail

/// F_j = int f test_j dx.
inline std::vector<double> assemble_load(const Problem& problem, const CellQuadrature& cq,
                                         const CaputoTestSpace* caputo) {
    return detail::tested_vector([&](double x) { return problem.f(x); }, cq, caputo, "assemble_load");
}

/// B_j = int g(x, u_h(x)) test_j dx.
inline std::vector<double> assemble_nonlinear(const FEFunction& u_h, const Problem& problem, const CellQuadrature& cq,
                                              const CaputoTestSpace* caputo) {
    if (!problem.g) {
        return std::vector<double>(static_cast<std::size_t>(u_h.mesh().n_interior()), 0.0);
    }
    return detail::tested_vector([&](double x) { return problem.g(x, u_h(x)); }, cq, caputo, "assemble_nonlinear");
}

/// Stiffness plus the g_u-weighted mass matrix M(j, i) = int g_u(x, u_h) phi_i test_j dx.
inline DenseMatrix assemble_jacobian(const FEFunction& u_h, const Problem& problem, const DenseMatrix& stiffness,
                                     const CellQuadrature& cq, const CaputoTestSpace* caputo) {
    DenseMatrix jac = stiffness;
    if (!problem.g_u) {
        return jac;
    }
    const UniformMesh& mesh = cq.mesh;
    const int n_cells = mesh.n_cells();
    const int n = mesh.n_interior();
    const double inv_h = n_cells;
    const double sm1 = caputo != nullptr ? caputo->order().value() - 1.0 : 0.0;
    // w_i = int g_u phi_i (1-x)^{s-1}
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int m = 1; m <= n_cells; ++m) {
        const double xl = mesh.node(m - 1);
        const int left = m - 1;  // hat index with value 1 - t on this cell
        const int right = m;     // hat index with value t
        double m_ll = 0.0, m_lr = 0.0, m_rr = 0.0, w_l = 0.0, w_r = 0.0;
        for (const QuadPoint& q : cq.cell(m)) {
            const double gu = detail::checked_value([&](double x) { return problem.g_u(x, u_h(x)); }, q.x,
                                                    "assemble_jacobian") *
                              q.w;
            const double t = (q.x - xl) * inv_h;
            m_ll += gu * (1.0 - t) * (1.0 - t);
            m_lr += gu * (1.0 - t) * t;
            m_rr += gu * t * t;
            if (caputo != nullptr) {
                const double c = std::pow(1.0 - q.x, sm1);
                w_l += gu * (1.0 - t) * c;
                w_r += gu * t * c;
            }
        }
        const bool has_l = left >= 1;
        const bool has_r = right <= n;
        if (has_l) {
            jac(left - 1, left - 1) += m_ll;
            w[static_cast<std::size_t>(left - 1)] += w_l;
        }
        if (has_r) {
            jac(right - 1, right - 1) += m_rr;
            w[static_cast<std::size_t>(right - 1)] += w_r;
        }
        if (has_l && has_r) {
            jac(left - 1, right - 1) += m_lr;
            jac(right - 1, left - 1) += m_lr;
        }
    }
    if (caputo != nullptr) {
        for (int j = 1; j <= n; ++j) {
            const double gj = caputo->gamma(j);
            for (int i = 1; i <= n; ++i) {
                jac(j - 1, i - 1) -= gj * w[static_cast<std::size_t>(i - 1)];
            }
        }
    }
    return jac;
}

/// Everything the Newton iteration needs for one (problem, mesh).
struct DiscreteSystem {
    Problem problem;
    HatBasis basis;
    std::optional<CaputoTestSpace> caputo;
    CellQuadrature quadrature;
    DenseMatrix stiffness;
    std::vector<double> load;

    [[nodiscard]] const CaputoTestSpace* test_space() const { return caputo ? &*caputo : nullptr; }
    [[nodiscard]] const UniformMesh& mesh() const { return basis.mesh(); }
    [[nodiscard]] int size() const { return basis.size(); }
};

inline DiscreteSystem build_system(const Problem& problem, const UniformMesh& mesh,
                                   const QuadratureSettings& settings = {}) {
    HatBasis basis(mesh);
    std::optional<CaputoTestSpace> caputo;
    if (problem.kind == DerivativeKind::Caputo) {
        caputo.emplace(basis, problem.s);
    }
    std::vector<double> extra;
    for (double p : problem.singular_points) {
        if (p > 0.0 && p < 1.0) {
            extra.push_back(p);
        }
    }
    CellQuadrature cq = cell_quadrature(mesh, extra, settings);
    DenseMatrix a = assemble_stiffness(basis, problem.s, problem.kind, settings);
    std::vector<double> f = assemble_load(problem, cq, caputo ? &*caputo : nullptr);
    return DiscreteSystem{problem, basis, std::move(caputo), std::move(cq), std::move(a), std::move(f)};
}

} // namespace fracfem
