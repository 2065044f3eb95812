#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fracfem/quadrature.hpp"

using namespace fracfem;

TEST(GaussRule, OrderOneAndTwo) {
    const GaussRule r1 = gauss_rule(1);
    EXPECT_EQ(r1.nodes[0], 0.0);
    EXPECT_DOUBLE_EQ(r1.weights[0], 2.0);
    const GaussRule r2 = gauss_rule(2);
    EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(r2.weights[1], 1.0, 1e-15);
}

TEST(GaussRule, WeightsSymmetryAndExactness) {
    for (int n : {1, 3, 8, 10, 16, 31, 64}) {
        const GaussRule r = gauss_rule(n);
        double wsum = 0.0;
        for (int q = 0; q < n; ++q) {
            wsum += r.weights[q];
            EXPECT_GT(r.weights[q], 0.0);
            EXPECT_NEAR(r.nodes[q], -r.nodes[n - 1 - q], 1e-15);
        }
        EXPECT_NEAR(wsum, 2.0, 1e-14) << n;
        for (int k = 0; k <= 2 * n - 1; ++k) {
            const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            EXPECT_NEAR(integrate_interval([k](double x) { return std::pow(x, k); }, -1.0, 1.0, r), exact, 1e-13)
                << "n=" << n << " k=" << k;
        }
    }
}

TEST(GaussRule, RejectsOutOfRangeOrder) {
    EXPECT_THROW(gauss_rule(0), DomainError);
    EXPECT_THROW(gauss_rule(65), DomainError);
}

TEST(CompositePlan, ExactnessOnAnyPlan) {
    const CompositePlan plan({0.0, 0.3, 0.71, 1.0}, {0.0, 0.71}, QuadratureSettings{});
    for (int k = 0; k <= 19; ++k) {
        EXPECT_NEAR(integrate([k](double x) { return std::pow(x, k); }, plan), 1.0 / (k + 1), 1e-13) << k;
    }
}

TEST(CompositePlan, IntegrableSingularityAtZero) {
    const CompositePlan plan({0.0, 1.0}, {0.0}, 0.15, 12, gauss_rule(16));
    EXPECT_NEAR(integrate([](double x) { return std::pow(x, -0.25); }, plan), 4.0 / 3.0, 1e-9);
}

TEST(CompositePlan, InteriorKinkAgainstRefinedReference) {
    const auto f = [](double x) { return std::pow(std::abs(x - 0.5), 0.25); };
    const CompositePlan plan = plan_for_pair(std::vector<double>{0.0, 0.5, 1.0}, {}, std::vector<double>{0.5});
    // int_0^1 |x - 1/2|^{1/4} dx = 2 (1/2)^{5/4} / (5/4)
    const double exact = 2.0 * std::pow(0.5, 1.25) / 1.25;
    EXPECT_NEAR(integrate(f, plan), exact, 1e-9);
}

TEST(CompositePlan, GradingConvergesMonotonically) {
    const auto f = [](double x) { return std::pow(x, -0.4); };
    const double exact = 1.0 / 0.6;
    double prev = 1e300;
    for (int levels = 4; levels <= 12; ++levels) {
        const CompositePlan plan({0.0, 1.0}, {0.0}, 0.15, levels, gauss_rule(10));
        const double err = std::abs(integrate(f, plan) - exact);
        EXPECT_LT(err, prev) << levels;
        prev = err;
    }
}

TEST(CompositePlan, PlanForPairPieces) {
    const CompositePlan trivial = plan_for_pair(std::vector<double>{0.0, 0.5, 1.0}, {}, {});
    ASSERT_EQ(trivial.pieces().size(), 2u);
    EXPECT_EQ(trivial.pieces()[0].hi, 0.5);

    const CompositePlan graded = plan_for_pair(std::vector<double>{0.0, 1.0}, {}, std::vector<double>{0.0});
    ASSERT_EQ(graded.pieces().size(), 12u);
    const auto p = graded.pieces();
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
        EXPECT_NEAR((p[k].hi - p[k].lo) / (p[k + 1].hi - p[k + 1].lo), 0.15, 1e-12);
    }
    EXPECT_EQ(p.front().lo, 0.0);
    EXPECT_EQ(p.back().hi, 1.0);

    const CompositePlan dedup = plan_for_pair(std::vector<double>{0.0, 0.5, 0.5 + 1e-16, 1.0}, {}, {});
    EXPECT_EQ(dedup.breakpoints().size(), 3u);
}

TEST(CompositePlan, DeterministicResults) {
    const auto f = [](double x) { return std::sin(3.0 * x) * std::pow(x, 0.3); };
    const CompositePlan a = plan_for_pair(std::vector<double>{0.0, 0.25, 1.0}, {}, std::vector<double>{0.0});
    const CompositePlan b = plan_for_pair(std::vector<double>{0.0, 0.25, 1.0}, {}, std::vector<double>{0.0});
    EXPECT_EQ(integrate(f, a), integrate(f, b));
}

TEST(CompositePlan, NonFiniteIntegrandNamesPiece) {
    const CompositePlan plan({0.0, 1.0}, {}, QuadratureSettings{});
    try {
        integrate([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, plan);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_NE(std::string(e.what()).find("piece"), std::string::npos);
    }
}

TEST(CompositePlan, SingularPointMustBeBreakpoint) {
    EXPECT_THROW(CompositePlan({0.0, 1.0}, {0.5}, QuadratureSettings{}), DomainError);
}
