#pragma once

#include <cmath>
#include <cstddef>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"

namespace qrlock {

/// Integrate a smooth 2*pi-periodic function over one period.
///
/// Equal-weight (trapezoidal) sums converge spectrally for smooth periodic
/// integrands; the point count doubles until successive estimates agree to
/// `tol` (relative, floored at absolute scale 1). Value type may be double or
/// std::complex<double>.
template <typename F>
auto integrate_periodic(F&& f, double tol = 1e-10, std::size_t max_points = (1u << 20))
    -> decltype(f(0.0)) {
    using value_type = decltype(f(0.0));

    std::size_t n = 32;
    double h = kTwoPi / static_cast<double>(n);
    value_type sum{};
    for (std::size_t j = 0; j < n; ++j) sum += f(-kPi + h * static_cast<double>(j));
    value_type estimate = sum * h;

    while (n < max_points) {
        // New points fall halfway between old ones; reuse the old sum.
        value_type mid_sum{};
        for (std::size_t j = 0; j < n; ++j)
            mid_sum += f(-kPi + h * (static_cast<double>(j) + 0.5));
        sum += mid_sum;
        n *= 2;
        h *= 0.5;
        value_type next = sum * h;
        double err = std::abs(next - estimate);
        double scale = std::abs(next);
        estimate = next;
        if (err <= tol * (scale > 1.0 ? scale : 1.0)) return estimate;
    }
    throw AnalysisError("periodic quadrature did not converge (integrand too sharp)");
}

}  // namespace qrlock
