#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fracfem/fe_space.hpp"
#include "fracfem/quadrature.hpp"

using namespace fracfem;

TEST(Mesh, RefinementLevels) {
    EXPECT_EQ(build_mesh(-1).n_cells(), 5);
    EXPECT_EQ(build_mesh(0).n_cells(), 10);
    EXPECT_EQ(build_mesh(5).n_cells(), 320);
    EXPECT_EQ(build_mesh(8).n_cells(), 2560);
    EXPECT_THROW(build_mesh(-2), DomainError);
    EXPECT_THROW(build_mesh(9), DomainError);
    EXPECT_THROW(UniformMesh(0), DomainError);
}

TEST(Mesh, NodesAndCells) {
    const UniformMesh m(8);
    const auto nodes = m.nodes();
    ASSERT_EQ(nodes.size(), 9u);
    EXPECT_EQ(nodes.front(), 0.0);
    EXPECT_EQ(nodes.back(), 1.0);
    EXPECT_EQ(m.cell_of(0.0), 1);
    EXPECT_EQ(m.cell_of(1.0), 8);
    EXPECT_EQ(m.cell_of(0.2), 2);
    EXPECT_EQ(m.n_interior(), 7);
}

TEST(HatBasis, PartitionOfUnityInTheInterior) {
    const HatBasis b(UniformMesh(6));
    for (double x = 1.0 / 6.0; x <= 5.0 / 6.0 + 1e-12; x += 0.01) {
        double sum = 0.0;
        for (int i = 1; i <= b.size(); ++i) {
            sum += b.eval(i, x);
        }
        EXPECT_NEAR(sum, 1.0, 1e-14) << x;
    }
    EXPECT_EQ(b.eval(3, 0.5), 1.0);
    EXPECT_EQ(b.eval(3, 0.9), 0.0);
    EXPECT_NEAR(b.deriv(3, 0.45), 6.0, 1e-14);
    EXPECT_NEAR(b.deriv(3, 0.55), -6.0, 1e-14);
    EXPECT_THROW((void)b.eval(0, 0.5), DomainError);
    EXPECT_THROW((void)b.eval(6, 0.5), DomainError);
}

TEST(Interpolation, QuarterMeshValues) {
    const HatBasis b(UniformMesh(4));
    const FEFunction u = interpolate([](double x) { return x * (1.0 - x); }, b);
    ASSERT_EQ(u.coefficients().size(), 3u);
    EXPECT_DOUBLE_EQ(u.coefficients()[0], 3.0 / 16.0);
    EXPECT_DOUBLE_EQ(u.coefficients()[1], 0.25);
    EXPECT_DOUBLE_EQ(u.coefficients()[2], 3.0 / 16.0);
    EXPECT_DOUBLE_EQ(u(0.125), 3.0 / 32.0);
    EXPECT_EQ(u(0.0), 0.0);
    EXPECT_EQ(u(1.0), 0.0);
}

TEST(Interpolation, L2ErrorIsSecondOrder) {
    const auto f = [](double x) { return std::sin(std::numbers::pi * x); };
    std::vector<double> errs;
    for (int n : {10, 20, 40, 80}) {
        const UniformMesh mesh(n);
        const FEFunction u = interpolate(f, HatBasis(mesh));
        const CompositePlan plan(mesh.nodes(), {}, QuadratureSettings{});
        errs.push_back(std::sqrt(integrate(
            [&](double x) {
                const double e = f(x) - u(x);
                return e * e;
            },
            plan)));
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        EXPECT_NEAR(std::log2(errs[k] / errs[k + 1]), 2.0, 0.05);
    }
}

TEST(Interpolation, RejectsNonFinite) {
    EXPECT_THROW(interpolate([](double x) { return 1.0 / (x - 0.5); }, HatBasis(UniformMesh(4))), DomainError);
}

TEST(FEFunction, SlopeJumpsSumToFinalSlope) {
    const FEFunction u(UniformMesh(5), {0.1, -0.3, 0.2, 0.4});
    const auto jumps = u.slope_jumps();
    ASSERT_EQ(jumps.size(), 5u);
    double sum = 0.0;
    for (double j : jumps) {
        sum += j;
    }
    EXPECT_NEAR(sum, (0.0 - 0.4) * 5.0, 1e-13);
    EXPECT_NEAR(jumps[0], 0.5, 1e-15);
    EXPECT_THROW(FEFunction(UniformMesh(5), {1.0}), DomainError);
}

class CaputoSpace : public ::testing::TestWithParam<double> {};

TEST_P(CaputoSpace, GammasPositiveAndOrthogonal) {
    const double s = GetParam();
    for (int n : {5, 20, 80}) {
        const UniformMesh mesh(n);
        const CaputoTestSpace ts{HatBasis(mesh), FracOrder(s)};
        EXPECT_NEAR(ts.denominator(), std::tgamma(2.0 - s) * std::tgamma(s), 1e-13);
        const CompositePlan plan =
            plan_for_pair(mesh.nodes(), {}, std::vector<double>{0.0, 1.0}, QuadratureSettings{16, 0.15, 80});
        for (int i = 1; i <= mesh.n_interior(); ++i) {
            EXPECT_GT(ts.gamma(i), 0.0);
            const double r = integrate([&](double x) { return std::pow(x, 1.0 - s) * ts.eval(i, x); }, plan);
            EXPECT_LT(std::abs(r), 1e-10) << "n=" << n << " i=" << i;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Orders, CaputoSpace, ::testing::Values(4.0 / 3.0, 1.5, 1.75));
