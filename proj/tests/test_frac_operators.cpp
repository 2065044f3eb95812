#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fracfem/frac_operators.hpp"

using namespace fracfem;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-3, std::abs(b)); }

const std::vector<double> kOrders{4.0 / 3.0, 1.5, 1.75};

} // namespace

TEST(HatHalfDerivative, LeftMatchesAbelOracle) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 80; ++n) {
        const FracOrder s(kOrders[n % 3]);
        const UniformMesh mesh(4 + n % 9);
        const HatBasis basis(mesh);
        const int i = 1 + n % mesh.n_interior();
        const double x = 0.01 + 0.98 * unit(rng);
        const auto nodes = mesh.nodes();
        const double oracle = abel_oracle([&](double t) { return basis.deriv(i, t); }, s.half(), x, nodes);
        EXPECT_LT(rel(left_halfderiv_hat(mesh, i, s, x), oracle), 1e-8) << "n=" << n;
    }
}

TEST(HatHalfDerivative, RightMatchesAbelOracle) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 80; ++n) {
        const FracOrder s(kOrders[n % 3]);
        const UniformMesh mesh(4 + n % 9);
        const HatBasis basis(mesh);
        const int i = 1 + n % mesh.n_interior();
        const double x = 0.01 + 0.98 * unit(rng);
        const auto nodes = mesh.nodes();
        const double oracle = abel_oracle_right([&](double t) { return basis.deriv(i, t); }, s.half(), x, nodes);
        EXPECT_LT(rel(right_halfderiv_hat(mesh, i, s, x), oracle), 1e-8) << "n=" << n;
    }
}

TEST(HatHalfDerivative, MirrorSymmetry) {
    const UniformMesh mesh(9);
    for (double sv : kOrders) {
        const FracOrder s(sv);
        for (int i = 1; i <= mesh.n_interior(); ++i) {
            for (double x = 0.0; x <= 1.0; x += 0.0371) {
                EXPECT_NEAR(right_halfderiv_hat(mesh, i, s, x), left_halfderiv_hat(mesh, 9 - i, s, 1.0 - x), 1e-12);
            }
        }
    }
}

TEST(HatHalfDerivative, SupportAndProfile) {
    const UniformMesh mesh(6);
    const FracOrder s(1.5);
    EXPECT_EQ(left_halfderiv_hat(mesh, 3, s, 0.3), 0.0);
    EXPECT_EQ(right_halfderiv_hat(mesh, 3, s, 0.7), 0.0);
    const HalfDerivProfile p(mesh, 3, Side::Right, s);
    EXPECT_EQ(p(0.45), right_halfderiv_hat(mesh, 3, s, 0.45));
    EXPECT_EQ(p.kinks()[1], 0.5);
    EXPECT_THROW(HalfDerivProfile(mesh, 6, Side::Left, s), DomainError);
}

TEST(CaputoCorrection, RightHalfDerivativeMatchesOracle) {
    for (double sv : kOrders) {
        const FracOrder s(sv);
        for (double x : {0.05, 0.3, 0.8, 0.97}) {
            // derivative of (1-t)^{s-1}, supplied reflected
            const double oracle = -abel_integral_right_reflected(
                [sv](double tau) { return -(sv - 1.0) * std::pow(tau, sv - 2.0); }, 1.0 - s.half(), x);
            EXPECT_LT(rel(right_halfderiv_caputo_correction(s, x), oracle), 1e-9) << sv << ' ' << x;
        }
    }
    EXPECT_THROW(right_halfderiv_caputo_correction(FracOrder(1.5), 1.0), DomainError);
}

TEST(CaputoCorrection, CrossTermVanishes) {
    // int D^{s/2} phi_i * xD1^{s/2} (1-x)^{s-1} dx = 0, integrated in y = 1 - x
    const UniformMesh mesh(10);
    for (double sv : kOrders) {
        const FracOrder s(sv);
        const double c = std::tgamma(sv) / std::tgamma(s.half());
        for (int i : {1, 4, 9}) {
            const std::vector<double> sing{1.0 - mesh.node(i - 1), 1.0 - mesh.node(i), 1.0 - mesh.node(i + 1), 0.0};
            const CompositePlan plan = plan_for_pair(mesh.nodes(), {}, sing, QuadratureSettings{16, 0.15, 24});
            const double v = integrate(
                [&](double y) { return left_halfderiv_hat(mesh, i, s, 1.0 - y) * c * std::pow(y, s.half() - 1.0); },
                plan);
            EXPECT_LT(std::abs(v), 1e-9) << sv << ' ' << i;
        }
    }
}

TEST(PowerSumHalfDerivative, MatchesOracle) {
    const PowerSum u({{0.8, 0.5}, {-0.8, 1.5}, {0.3, 2.2}});
    for (double sv : kOrders) {
        const FracOrder s(sv);
        const PowerSum du = left_halfderiv_powersum(u, s);
        for (double x : {0.1, 0.55, 0.9}) {
            const double oracle = abel_oracle([&](double t) { return u.derivative(t); }, s.half(), x);
            EXPECT_LT(rel(du(x), oracle), 1e-9);
            EXPECT_NEAR(left_halfderiv_powersum(u, s, x), du(x), 1e-13);
        }
    }
}

TEST(FEHalfDerivative, EqualsSumOfHatProfiles) {
    const UniformMesh mesh(7);
    const std::vector<double> c{0.2, -0.1, 0.5, 0.3, -0.4, 0.05};
    const FEFunction u(mesh, c);
    for (double sv : kOrders) {
        const FracOrder s(sv);
        const FEHalfDerivative du(u, s);
        for (double x = 0.0; x <= 1.0; x += 0.023) {
            double ref = 0.0;
            for (int i = 1; i <= 6; ++i) {
                ref += c[static_cast<std::size_t>(i - 1)] * left_halfderiv_hat(mesh, i, s, x);
            }
            EXPECT_NEAR(du(x), ref, 1e-12) << x;
        }
    }
}
