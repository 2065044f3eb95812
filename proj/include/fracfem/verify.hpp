#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "fracfem/assembly.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/frac_operators.hpp"
#include "fracfem/fractional_calculus.hpp"
#include "fracfem/problem.hpp"

namespace fracfem {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

namespace detail {

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-6); }

} // namespace detail

/// Quick oracle and property checks for the `verify` subcommand. A reduced
/// sample of the full test suite, seeded for reproducibility.
inline std::vector<VerifyCheck> run_verify(unsigned seed = 20240501u, int samples = 40) {
    std::vector<VerifyCheck> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<double> orders{4.0 / 3.0, 1.5, 1.75};

    {
        double worst = 0.0;
        for (int n = 0; n < samples; ++n) {
            const FracOrder s(orders[static_cast<std::size_t>(n) % orders.size()]);
            const UniformMesh mesh(5 + n % 7);
            const HatBasis basis(mesh);
            const int i = 1 + static_cast<int>(unit(rng) * mesh.n_interior()) % mesh.n_interior();
            const double x = 0.02 + 0.96 * unit(rng);
            const auto nodes = mesh.nodes();
            const double closed = left_halfderiv_hat(mesh, i, s, x);
            const double oracle = abel_oracle([&](double t) { return basis.deriv(i, t); }, s.half(), x, nodes);
            if (std::abs(closed) > 1e-6) {
                worst = std::max(worst, detail::relative_gap(closed, oracle));
            }
        }
        out.push_back({"hat half-derivative vs Abel oracle", worst <= 1e-8, worst, 1e-8});
    }
    {
        double worst = 0.0;
        for (double sv : orders) {
            for (const auto& name : registry_names()) {
                for (DerivativeKind kind : admissible_kinds(name)) {
                    if (name == "example4" && sv < 1.25) {
                        continue;
                    }
                    const Problem p = make_problem(name, FracOrder(sv), kind);
                    worst = std::max(worst, manufactured_residual(p).max_residual);
                }
            }
        }
        out.push_back({"registry manufactured residual", worst <= 1e-9, worst, 1e-9});
    }
    {
        double worst_min = 1e300;
        for (double sv : orders) {
            for (int n : {5, 20}) {
                const DenseMatrix a = assemble_stiffness(HatBasis(UniformMesh(n)), FracOrder(sv),
                                                         DerivativeKind::RiemannLiouville);
                for (int t = 0; t < 20; ++t) {
                    std::vector<double> c(static_cast<std::size_t>(a.size()));
                    for (double& v : c) {
                        v = 2.0 * unit(rng) - 1.0;
                    }
                    worst_min = std::min(worst_min, a.quadratic_form(c) / std::max(1e-300, norm2(c) * norm2(c)));
                }
            }
        }
        out.push_back({"stiffness quadratic form positive", worst_min > 0.0, worst_min, 0.0});
    }
    {
        double worst = 0.0;
        const UniformMesh mesh(20);
        for (double sv : orders) {
            const CaputoTestSpace ts{HatBasis(mesh), FracOrder(sv)};
            const CompositePlan plan =
                plan_for_pair(mesh.nodes(), {}, std::vector<double>{0.0, 1.0}, QuadratureSettings{16, 0.15, 80});
            for (int i = 1; i <= mesh.n_interior(); ++i) {
                const double r =
                    integrate([&](double x) { return std::pow(x, 1.0 - sv) * ts.eval(i, x); }, plan);
                worst = std::max(worst, std::abs(r));
            }
        }
        out.push_back({"Caputo test-space orthogonality", worst <= 1e-10, worst, 1e-10});
    }
    return out;
}

inline bool print_verify(const std::vector<VerifyCheck>& checks, std::ostream& os) {
    bool ok = true;
    for (const auto& c : checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s  %-40s measured=%.3e tol=%.1e", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                      c.measured, c.tolerance);
        os << buf << '\n';
        ok = ok && c.passed;
    }
    return ok;
}

} // namespace fracfem
