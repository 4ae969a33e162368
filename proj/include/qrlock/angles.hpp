#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>

#include "qrlock/errors.hpp"

namespace qrlock {

inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

/// Map an angle to the canonical interval [-pi, pi).
inline double wrap_angle(double x) {
    double w = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
    // Rounding in the floor argument can land exactly on +pi.
    if (w >= kPi) w -= kTwoPi;
    if (w < -kPi) w += kTwoPi;
    return w;
}

/// Smallest signed difference a-b on the circle, in [-pi, pi).
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Complex resultant (1/N) sum exp(i phi_k). Basis for all circular statistics.
inline std::complex<double> circular_resultant(std::span<const double> phases) {
    if (phases.empty()) throw ParameterError("circular statistics require at least one phase");
    double c = 0.0, s = 0.0;
    for (double p : phases) {
        c += std::cos(p);
        s += std::sin(p);
    }
    double n = static_cast<double>(phases.size());
    return {c / n, s / n};
}

inline double circular_mean(std::span<const double> phases) {
    auto r = circular_resultant(phases);
    return std::atan2(r.imag(), r.real());
}

/// Mean resultant length, in [0, 1]. 1 means all phases identical.
inline double circular_resultant_length(std::span<const double> phases) {
    return std::abs(circular_resultant(phases));
}

/// Circular standard deviation sqrt(-2 ln R). Zero resultant gives +inf.
inline double circular_std(std::span<const double> phases) {
    double r = circular_resultant_length(phases);
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    if (r >= 1.0) return 0.0;
    return std::sqrt(-2.0 * std::log(r));
}

}  // namespace qrlock
