#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracfem/errors.hpp"

namespace fracfem {

/// One term c * x^p of a PowerSum.
struct PowerTerm {
    double coefficient = 0.0;
    double exponent = 0.0;

    friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

/// Finite linear combination sum_i c_i x^{p_i} on [0, 1].
///
/// Kept in canonical form: exponents strictly increasing, no zero
/// coefficients, every exponent > -1 so the function is Abel-integrable on
/// [0, 1]. Exponents closer than kExponentMerge are merged into one term.
class PowerSum {
public:
    static constexpr double kExponentMerge = 1e-13;

    PowerSum() = default;

    PowerSum(std::initializer_list<PowerTerm> terms) : PowerSum(std::vector<PowerTerm>(terms)) {}

    explicit PowerSum(std::vector<PowerTerm> terms) {
        for (const auto& t : terms) {
            if (!std::isfinite(t.coefficient) || !std::isfinite(t.exponent)) {
                throw DomainError("PowerSum: non-finite coefficient or exponent");
            }
        }
        std::stable_sort(terms.begin(), terms.end(),
                         [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
        for (const auto& t : terms) {
            if (!terms_.empty() && t.exponent - terms_.back().exponent <= kExponentMerge) {
                terms_.back().coefficient += t.coefficient;
            } else {
                terms_.push_back(t);
            }
        }
        std::erase_if(terms_, [](const PowerTerm& t) { return t.coefficient == 0.0; });
        for (const auto& t : terms_) {
            if (!(t.exponent > -1.0)) {
                throw DomainError("PowerSum: exponent " + std::to_string(t.exponent) +
                                  " is not integrable on [0,1] (must exceed -1)");
            }
        }
    }

    static PowerSum monomial(double coefficient, double exponent) {
        return PowerSum({PowerTerm{coefficient, exponent}});
    }

    /// Copy whose highest-exponent coefficient is reset so the value at
    /// x = 1 sums to exactly zero in evaluation order.
    [[nodiscard]] PowerSum pinned_zero_at_one() const {
        if (terms_.size() < 2) {
            throw DomainError("PowerSum: cannot pin a single-term sum to vanish at 1");
        }
        PowerSum out = *this;
        double partial = 0.0;
        for (std::size_t k = 0; k + 1 < out.terms_.size(); ++k) {
            partial += out.terms_[k].coefficient;
        }
        out.terms_.back().coefficient = -partial;
        return out;
    }

    [[nodiscard]] std::span<const PowerTerm> terms() const { return terms_; }
    [[nodiscard]] bool empty() const { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    /// Smallest exponent, or +inf for the zero function.
    [[nodiscard]] double min_exponent() const {
        return terms_.empty() ? std::numeric_limits<double>::infinity() : terms_.front().exponent;
    }

    /// Evaluates at x in [0, 1]; x = 0 with a negative exponent yields +-inf.
    [[nodiscard]] double operator()(double x) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            sum += t.coefficient * std::pow(x, t.exponent);
        }
        return sum;
    }

    /// Classical first derivative; requires every exponent to be 0 or > 0.
    [[nodiscard]] double derivative(double x) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            if (t.exponent == 0.0) {
                continue;
            }
            sum += t.coefficient * t.exponent * std::pow(x, t.exponent - 1.0);
        }
        return sum;
    }

    friend PowerSum operator+(const PowerSum& a, const PowerSum& b) {
        std::vector<PowerTerm> all(a.terms_.begin(), a.terms_.end());
        all.insert(all.end(), b.terms_.begin(), b.terms_.end());
        return PowerSum(std::move(all));
    }

    friend PowerSum operator*(double c, const PowerSum& a) {
        std::vector<PowerTerm> out;
        out.reserve(a.terms_.size());
        for (const auto& t : a.terms_) {
            out.push_back({c * t.coefficient, t.exponent});
        }
        return PowerSum(std::move(out));
    }

    friend PowerSum operator-(const PowerSum& a, const PowerSum& b) { return a + (-1.0) * b; }

    friend bool operator==(const PowerSum&, const PowerSum&) = default;

private:
    std::vector<PowerTerm> terms_;
};

} // namespace fracfem
