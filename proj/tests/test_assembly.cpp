#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fracfem/assembly.hpp"
#include "fracfem/linear_algebra.hpp"

using namespace fracfem;

namespace {

const std::vector<double> kOrders{4.0 / 3.0, 1.5, 1.75};

// Independent closed form: entry (j, i) = -h^{1-s}/Gamma(4-s) * fourth difference
// of m_+^{3-s} centred at j - i.
double closed_form_entry(int n_cells, double s, int j, int i) {
    const double h = 1.0 / n_cells;
    const int d = j - i;
    const double w[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    double sum = 0.0;
    for (int k = -2; k <= 2; ++k) {
        const double m = d + k;
        sum += w[k + 2] * (m > 0.0 ? std::pow(m, 3.0 - s) : 0.0);
    }
    return -std::pow(h, 1.0 - s) / std::tgamma(4.0 - s) * sum;
}

Problem unit_mass_problem(DerivativeKind kind, double s) {
    Problem p;
    p.name = "mass";
    p.kind = kind;
    p.s = FracOrder(s);
    p.g = [](double, double u) { return u; };
    p.g_u = [](double, double) { return 1.0; };
    p.rhs_fractional = PowerSum::monomial(1.0, 0.0);
    return p;
}

} // namespace

TEST(Stiffness, MatchesClosedForm) {
    for (double s : kOrders) {
        for (int n : {5, 10, 40}) {
            const DenseMatrix a = assemble_stiffness(HatBasis(UniformMesh(n)), FracOrder(s),
                                                     DerivativeKind::RiemannLiouville);
            const double scale = std::abs(a(0, 0));
            for (int j = 1; j < n; ++j) {
                for (int i = 1; i < n; ++i) {
                    EXPECT_NEAR(a(j - 1, i - 1), closed_form_entry(n, s, j, i), 1e-9 * scale)
                        << "s=" << s << " n=" << n << " (" << j << "," << i << ")";
                }
            }
        }
    }
}

TEST(Stiffness, ToeplitzFillMatchesDirectEntries) {
    const UniformMesh mesh(12);
    const FracOrder s(1.5);
    const DenseMatrix a = assemble_stiffness(HatBasis(mesh), s, DerivativeKind::RiemannLiouville);
    for (auto [j, i] : std::vector<std::pair<int, int>>{{1, 2}, {5, 6}, {7, 3}, {11, 1}, {9, 9}, {3, 8}}) {
        EXPECT_NEAR(a(j - 1, i - 1), stiffness_entry(mesh, s, j, i), 1e-14 * std::abs(a(0, 0)));
    }
    EXPECT_EQ(a(2, 7), 0.0);
}

TEST(Stiffness, SignPattern) {
    const DenseMatrix a = assemble_stiffness(HatBasis(UniformMesh(10)), FracOrder(1.5), DerivativeKind::Caputo);
    EXPECT_GT(a(0, 0), 0.0);
    EXPECT_LT(a(0, 1), 0.0);
    EXPECT_EQ(a(0, 2), 0.0);
}

TEST(Stiffness, CaputoEqualsRiemannLiouville) {
    for (double s : kOrders) {
        const HatBasis b(UniformMesh(16));
        const DenseMatrix rl = assemble_stiffness(b, FracOrder(s), DerivativeKind::RiemannLiouville);
        const DenseMatrix cap = assemble_stiffness(b, FracOrder(s), DerivativeKind::Caputo);
        for (int r = 0; r < rl.size(); ++r) {
            for (int c = 0; c < rl.size(); ++c) {
                EXPECT_EQ(rl(r, c), cap(r, c));
            }
        }
    }
}

TEST(Stiffness, QuadraticFormIsPositive) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (double s : kOrders) {
        for (int n : {5, 20, 80}) {
            const DenseMatrix a = assemble_stiffness(HatBasis(UniformMesh(n)), FracOrder(s),
                                                     DerivativeKind::RiemannLiouville);
            for (int t = 0; t < 25; ++t) {
                std::vector<double> c(static_cast<std::size_t>(a.size()));
                for (double& v : c) {
                    v = normal(rng);
                }
                EXPECT_GT(a.quadratic_form(c), 0.0);
            }
        }
    }
}

TEST(Load, ConstantRhs) {
    const UniformMesh mesh(10);
    const double s = 1.5;
    Problem p = unit_mass_problem(DerivativeKind::RiemannLiouville, s);
    const CellQuadrature cq = cell_quadrature(mesh, {}, QuadratureSettings{});
    const auto f_rl = assemble_load(p, cq, nullptr);
    for (double v : f_rl) {
        EXPECT_NEAR(v, 0.1, 1e-14);
    }
    const CaputoTestSpace ts{HatBasis(mesh), FracOrder(s)};
    const auto f_c = assemble_load(p, cq, &ts);
    for (int j = 1; j <= 9; ++j) {
        EXPECT_NEAR(f_c[static_cast<std::size_t>(j - 1)], 0.1 - ts.gamma(j) / s, 1e-11);
    }
}

TEST(Load, SingularRhsIntegratesAccurately) {
    // f = x^{-1/4}: int phi_1 f on N = 2 equals int_0^1 x^{-1/4} min(2x, 2-2x) dx
    Problem p = unit_mass_problem(DerivativeKind::RiemannLiouville, 1.5);
    p.rhs_fractional = PowerSum::monomial(1.0, -0.25);
    const UniformMesh mesh(2);
    const auto f = assemble_load(p, cell_quadrature(mesh, {}, QuadratureSettings{}), nullptr);
    // 2 [x^{7/4}/(7/4)]_0^{1/2} + 2 [x^{3/4}/(3/4) - x^{7/4}/(7/4)]_{1/2}^1
    const auto P = [](double x, double a) { return std::pow(x, a) / a; };
    const double exact = 2.0 * P(0.5, 1.75) + 2.0 * ((P(1.0, 0.75) - P(1.0, 1.75)) - (P(0.5, 0.75) - P(0.5, 1.75)));
    EXPECT_NEAR(f[0], exact, 1e-9);
}

TEST(Jacobian, UnitCoefficientGivesMassMatrix) {
    const UniformMesh mesh(8);
    const Problem p = unit_mass_problem(DerivativeKind::RiemannLiouville, 1.5);
    const CellQuadrature cq = cell_quadrature(mesh, {}, QuadratureSettings{});
    const DenseMatrix zero(mesh.n_interior());
    const DenseMatrix m = assemble_jacobian(FEFunction(mesh), p, zero, cq, nullptr);
    const double h = mesh.h();
    for (int r = 0; r < m.size(); ++r) {
        for (int c = 0; c < m.size(); ++c) {
            const double want = r == c ? 2.0 * h / 3.0 : (std::abs(r - c) == 1 ? h / 6.0 : 0.0);
            EXPECT_NEAR(m(r, c), want, 1e-14);
        }
    }
}

class JacobianFd : public ::testing::TestWithParam<DerivativeKind> {};

TEST_P(JacobianFd, MatchesFiniteDifferences) {
    const DerivativeKind kind = GetParam();
    const UniformMesh mesh(10);
    // g = 3 x u^3 + sin(x) u^5 exercises non-constant g_u
    Problem p = unit_mass_problem(kind, 1.6);
    p.g = [](double x, double u) { return 3.0 * x * u * u * u + std::sin(x) * std::pow(u, 5); };
    p.g_u = [](double x, double u) { return 9.0 * x * u * u + 5.0 * std::sin(x) * std::pow(u, 4); };
    const HatBasis basis(mesh);
    std::optional<CaputoTestSpace> ts;
    if (kind == DerivativeKind::Caputo) {
        ts.emplace(basis, p.s);
    }
    const CaputoTestSpace* tsp = ts ? &*ts : nullptr;
    const CellQuadrature cq = cell_quadrature(mesh, {}, QuadratureSettings{});
    const DenseMatrix a = assemble_stiffness(basis, p.s, kind);
    const FEFunction u = interpolate([](double x) { return 0.8 * std::sin(3.0 * x) * (1.0 - x); }, basis);
    const DenseMatrix jac = assemble_jacobian(u, p, a, cq, tsp);

    const auto op = [&](const std::vector<double>& c) {
        auto out = a.multiply(c);
        const auto b = assemble_nonlinear(FEFunction(mesh, c), p, cq, tsp);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += b[k];
        }
        return out;
    };
    const std::vector<double> c0(u.coefficients().begin(), u.coefficients().end());
    const double eps = 1e-6;
    for (int i = 0; i < jac.size(); ++i) {
        auto cp = c0, cm = c0;
        cp[static_cast<std::size_t>(i)] += eps;
        cm[static_cast<std::size_t>(i)] -= eps;
        const auto fp = op(cp), fm = op(cm);
        for (int j = 0; j < jac.size(); ++j) {
            const double fd = (fp[static_cast<std::size_t>(j)] - fm[static_cast<std::size_t>(j)]) / (2.0 * eps);
            EXPECT_NEAR(jac(j, i), fd, 1e-6 * std::max(1.0, std::abs(jac(j, i)))) << j << ',' << i;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, JacobianFd,
                         ::testing::Values(DerivativeKind::RiemannLiouville, DerivativeKind::Caputo));

TEST(CellQuadrature, IntegratesPolynomialsAndCoversEveryCell) {
    const UniformMesh mesh(6);
    const std::vector<double> extra{0.5};
    const CellQuadrature cq = cell_quadrature(mesh, extra, QuadratureSettings{});
    double total = 0.0;
    for (int m = 1; m <= 6; ++m) {
        ASSERT_FALSE(cq.cell(m).empty());
        for (const QuadPoint& q : cq.cell(m)) {
            EXPECT_GE(q.x, mesh.node(m - 1));
            EXPECT_LE(q.x, mesh.node(m));
            total += q.w * q.x * q.x;
        }
    }
    EXPECT_NEAR(total, 1.0 / 3.0, 1e-14);
}

TEST(BuildSystem, SizesAndNonFiniteLoad) {
    Problem p = unit_mass_problem(DerivativeKind::Caputo, 1.5);
    const DiscreteSystem sys = build_system(p, UniformMesh(10));
    EXPECT_EQ(sys.size(), 9);
    EXPECT_EQ(sys.load.size(), 9u);
    EXPECT_NE(sys.test_space(), nullptr);
    p.rhs_extra = [](double x) { return x > 0.3 ? std::nan("") : 0.0; };
    EXPECT_THROW(build_system(p, UniformMesh(10)), QuadratureError);
}

TEST(LinearAlgebra, SmallSolve) {
    DenseMatrix m(2);
    m(0, 0) = 2.0;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    m(1, 1) = 3.0;
    const auto x = lu_solve(m, {3.0, 5.0});
    EXPECT_NEAR(x[0], 0.8, 1e-15);
    EXPECT_NEAR(x[1], 1.4, 1e-15);
}

TEST(LinearAlgebra, RandomSpdSolve) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = 50;
    DenseMatrix b(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            b(r, c) = unit(rng);
        }
    }
    DenseMatrix a(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double s = r == c ? n : 0.0;
            for (int k = 0; k < n; ++k) {
                s += b(k, r) * b(k, c);
            }
            a(r, c) = s;
        }
    }
    std::vector<double> x_true(n);
    for (double& v : x_true) {
        v = unit(rng);
    }
    const auto x = lu_solve(a, a.multiply(x_true));
    for (int k = 0; k < n; ++k) {
        EXPECT_NEAR(x[static_cast<std::size_t>(k)], x_true[static_cast<std::size_t>(k)], 1e-12);
    }
}

TEST(LinearAlgebra, SingularAndMismatch) {
    DenseMatrix m(2, 1.0);
    EXPECT_THROW(lu_solve(m, {1.0, 1.0}), SingularMatrixError);
    EXPECT_THROW(lu_solve(DenseMatrix::identity(3), {1.0}), DomainError);
    DenseMatrix bad = DenseMatrix::identity(2);
    bad(0, 1) = std::nan("");
    EXPECT_THROW(lu_solve(bad, {1.0, 1.0}), DomainError);
}
