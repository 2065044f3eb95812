#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "fracfem/errors.hpp"

namespace fracfem {

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(x) for x >= 0.5.
inline double lanczos_log_gamma(double x) {
    const double z = x - 1.0;
    double series = kLanczosCoeffs[0];
    for (std::size_t k = 1; k < kLanczosCoeffs.size(); ++k) {
        series += kLanczosCoeffs[k] / (z + static_cast<double>(k));
    }
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

// Distance (in absolute terms) below which an argument is treated as sitting
// on a pole of Gamma. Orders such as s - 1 + 1 - s rarely cancel to an exact
// zero in floating point.
inline constexpr double kPoleSnap = 1e-12;

inline bool near_nonpositive_integer(double x) {
    if (x > 0.5) {
        return false;
    }
    const double n = std::round(x);
    return n <= 0.0 && std::abs(x - n) <= kPoleSnap;
}

} // namespace detail

/// log|Gamma(x)| for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma: argument must be positive and finite");
    }
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
               detail::lanczos_log_gamma(1.0 - x);
    }
    return detail::lanczos_log_gamma(x);
}

/// 1 / Gamma(x) on the whole real line; exactly 0 at the poles 0, -1, -2, ...
inline double reciprocal_gamma(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("reciprocal_gamma: non-finite argument");
    }
    if (detail::near_nonpositive_integer(x)) {
        return 0.0;
    }
    if (x >= 0.5) {
        return std::exp(-detail::lanczos_log_gamma(x));
    }
    // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    return std::sin(std::numbers::pi * x) * std::exp(detail::lanczos_log_gamma(1.0 - x)) /
           std::numbers::pi;
}

/// Gamma(x) away from the poles.
inline double gamma_fn(double x) {
    if (detail::near_nonpositive_integer(x)) {
        throw DomainError("gamma_fn: pole at non-positive integer");
    }
    if (x >= 0.5) {
        return std::exp(detail::lanczos_log_gamma(x));
    }
    return std::numbers::pi /
           (std::sin(std::numbers::pi * x) * std::exp(detail::lanczos_log_gamma(1.0 - x)));
}

/// Ratio Gamma(a) / Gamma(b) for a > 0, with b anywhere (zero at poles of Gamma(b)).
inline double gamma_ratio(double a, double b) {
    if (!(a > 0.0)) {
        throw DomainError("gamma_ratio: numerator argument must be positive");
    }
    if (detail::near_nonpositive_integer(b)) {
        return 0.0;
    }
    if (b > 0.0) {
        return std::exp(log_gamma(a) - log_gamma(b));
    }
    return gamma_fn(a) * reciprocal_gamma(b);
}

/// Euler Beta function B(a, b) for a, b > 0.
inline double beta_fn(double a, double b) {
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

} // namespace fracfem
