#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/errors.hpp"

namespace fracfem {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on the Legendre polynomial P_order.
inline GaussRule gauss_rule(int order) {
    if (order < 1 || order > 64) {
        throw DomainError("gauss_rule: order must lie in [1, 64], got " + std::to_string(order));
    }
    GaussRule rule;
    rule.order = order;
    rule.nodes.assign(static_cast<std::size_t>(order), 0.0);
    rule.weights.assign(static_cast<std::size_t>(order), 0.0);
    const int n = order;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_n and P_{n-1}.
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        const double pn = (n == 1) ? x : p1;
        const double pnm1 = (n == 1) ? 1.0 : p0;
        dp = n * (x * pn - pnm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

/// Tunables shared by every composite integration in the library.
struct QuadratureSettings {
    int order = 10;
    double grading_ratio = 0.15;
    int grading_levels = 12;
    /// Rule order for stiffness entries. A c cancels heavily for smooth c,
    /// so entry errors near 1e-8 relative already show in the L2 error.
    int stiffness_order = 16;

    [[nodiscard]] QuadratureSettings for_stiffness() const {
        QuadratureSettings out = *this;
        out.order = std::max(order, stiffness_order);
        return out;
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Breakpoints plus geometric grading toward flagged singular breakpoints.
///
/// Every piece between consecutive breakpoints is integrated with the same
/// Gauss rule. A piece touching one flagged endpoint is replaced by
/// grading_levels subintervals whose lengths shrink by grading_ratio toward
/// that endpoint; a piece with both ends flagged is halved first.
class CompositePlan {
public:
    static constexpr double kDedupTolerance = 1e-14;

    CompositePlan(std::vector<double> breakpoints, std::vector<double> singular, double grading_ratio,
                  int grading_levels, GaussRule rule)
        : grading_ratio_(grading_ratio), grading_levels_(grading_levels), rule_(std::move(rule)) {
        if (!(grading_ratio > 0.0 && grading_ratio < 1.0)) {
            throw DomainError("CompositePlan: grading ratio must lie in (0, 1)");
        }
        if (grading_levels < 1) {
            throw DomainError("CompositePlan: grading levels must be positive");
        }
        breakpoints_ = dedup(std::move(breakpoints));
        if (breakpoints_.size() < 2) {
            throw DomainError("CompositePlan: need at least two distinct breakpoints");
        }
        for (double p : singular) {
            const auto it = std::find_if(breakpoints_.begin(), breakpoints_.end(),
                                         [p](double b) { return std::abs(b - p) <= kDedupTolerance; });
            if (it == breakpoints_.end()) {
                throw DomainError("CompositePlan: singular point is not a breakpoint");
            }
            if (std::find(singular_.begin(), singular_.end(), *it) == singular_.end()) {
                singular_.push_back(*it);
            }
        }
        std::sort(singular_.begin(), singular_.end());
        build_pieces();
    }

    CompositePlan(std::vector<double> breakpoints, std::vector<double> singular,
                  const QuadratureSettings& settings)
        : CompositePlan(std::move(breakpoints), std::move(singular), settings.grading_ratio,
                        settings.grading_levels, gauss_rule(settings.order)) {}

    [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }
    [[nodiscard]] std::span<const double> singular_points() const { return singular_; }
    [[nodiscard]] std::span<const Interval> pieces() const { return pieces_; }
    [[nodiscard]] const GaussRule& rule() const { return rule_; }
    [[nodiscard]] double grading_ratio() const { return grading_ratio_; }
    [[nodiscard]] int grading_levels() const { return grading_levels_; }

    static std::vector<double> dedup(std::vector<double> points) {
        std::sort(points.begin(), points.end());
        std::vector<double> out;
        for (double p : points) {
            if (!std::isfinite(p)) {
                throw DomainError("CompositePlan: non-finite breakpoint");
            }
            if (out.empty() || p - out.back() > kDedupTolerance) {
                out.push_back(p);
            }
        }
        return out;
    }

private:
    [[nodiscard]] bool is_singular(double p) const {
        return std::binary_search(singular_.begin(), singular_.end(), p);
    }

    void grade_toward_lo(double a, double b) {
        const double len = b - a;
        // pieces from the far end inward: [a + len r^{k+1}, a + len r^k]
        std::vector<Interval> tmp;
        double outer = 1.0;
        for (int k = 0; k + 1 < grading_levels_; ++k) {
            const double inner = outer * grading_ratio_;
            tmp.push_back({a + len * inner, a + len * outer});
            outer = inner;
        }
        tmp.push_back({a, a + len * outer});
        pieces_.insert(pieces_.end(), tmp.rbegin(), tmp.rend());
    }

    void grade_toward_hi(double a, double b) {
        const double len = b - a;
        double outer = 1.0;
        for (int k = 0; k + 1 < grading_levels_; ++k) {
            const double inner = outer * grading_ratio_;
            pieces_.push_back({b - len * outer, b - len * inner});
            outer = inner;
        }
        pieces_.push_back({b - len * outer, b});
    }

    void build_pieces() {
        pieces_.clear();
        for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
            const double a = breakpoints_[k];
            const double b = breakpoints_[k + 1];
            const bool sa = is_singular(a);
            const bool sb = is_singular(b);
            if (sa && sb) {
                const double m = 0.5 * (a + b);
                grade_toward_lo(a, m);
                grade_toward_hi(m, b);
            } else if (sa) {
                grade_toward_lo(a, b);
            } else if (sb) {
                grade_toward_hi(a, b);
            } else {
                pieces_.push_back({a, b});
            }
        }
    }

    std::vector<double> breakpoints_;
    std::vector<double> singular_;
    double grading_ratio_;
    int grading_levels_;
    GaussRule rule_;
    std::vector<Interval> pieces_;
};

/// Gauss sum of f over [lo, hi].
template <class F>
double integrate_interval(F&& f, double lo, double hi, const GaussRule& rule) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
    }
    return half * sum;
}

/// Composite sum over every piece of the plan. A non-finite integrand value
/// raises QuadratureError naming the piece where it happened.
template <class F>
double integrate(F&& f, const CompositePlan& plan) {
    const GaussRule& rule = plan.rule();
    double total = 0.0;
    for (const Interval& piece : plan.pieces()) {
        const double mid = 0.5 * (piece.lo + piece.hi);
        const double half = 0.5 * (piece.hi - piece.lo);
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = mid + half * rule.nodes[q];
            const double fx = f(x);
            if (!std::isfinite(fx)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "integrate: non-finite integrand value at x = " << x << " on piece [" << piece.lo
                    << ", " << piece.hi << "]";
                throw QuadratureError(msg.str());
            }
            sum += rule.weights[q] * fx;
        }
        total += half * sum;
    }
    return total;
}

/// Plan over [0, 1] splitting at mesh nodes and extra kinks, graded toward
/// the flagged singular points (which are added as breakpoints if needed).
inline CompositePlan plan_for_pair(std::span<const double> mesh_nodes, std::span<const double> extra_kinks,
                                   std::span<const double> singular,
                                   const QuadratureSettings& settings = {}) {
    std::vector<double> points{0.0, 1.0};
    auto add = [&](std::span<const double> pts) {
        for (double p : pts) {
            if (p < 0.0 || p > 1.0) {
                throw DomainError("plan_for_pair: point outside [0, 1]");
            }
            points.push_back(p);
        }
    };
    add(mesh_nodes);
    add(extra_kinks);
    add(singular);
    return CompositePlan(std::move(points), std::vector<double>(singular.begin(), singular.end()), settings);
}

} // namespace fracfem
