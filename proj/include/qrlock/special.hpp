#pragma once

#include <cmath>

#include "qrlock/errors.hpp"

namespace qrlock {

/// psi'(z) for z > 0. Upward recurrence into the asymptotic region, then the
/// Bernoulli series; relative error below 1e-12 for the arguments used here.
inline double trigamma(double z) {
    if (!(z > 0.0)) throw ParameterError("trigamma requires z > 0");
    double acc = 0.0;
    while (z < 20.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    double r = 1.0 / z, r2 = r * r;
    double series =
        r + 0.5 * r2 +
        r * r2 *
            (1.0 / 6.0 +
             r2 * (-1.0 / 30.0 +
                   r2 * (1.0 / 42.0 +
                         r2 * (-1.0 / 30.0 + r2 * (5.0 / 66.0 - r2 * (691.0 / 2730.0))))));
    return acc + series;
}

/// psi'''(z) for z > 0, same scheme as trigamma.
inline double polygamma3(double z) {
    if (!(z > 0.0)) throw ParameterError("polygamma3 requires z > 0");
    double acc = 0.0;
    while (z < 20.0) {
        double z2 = z * z;
        acc += 6.0 / (z2 * z2);
        z += 1.0;
    }
    double r = 1.0 / z, r2 = r * r;
    double r3 = r * r2;
    double series =
        r3 * (2.0 + 3.0 * r +
              r2 * (2.0 + r2 * (-1.0 + r2 * (4.0 / 3.0 + r2 * (-3.0 + r2 * 10.0)))));
    return acc + series;
}

/// ln(n!) for non-negative n.
inline double log_factorial(int n) {
    if (n < 0) throw ParameterError("log_factorial requires n >= 0");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace qrlock
