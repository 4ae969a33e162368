#pragma once

#include <cmath>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"
#include "qrlock/faddeeva.hpp"
#include "qrlock/special.hpp"

namespace qrlock {

/// Voigt profile V(x; sigma, gamma): Gaussian (std sigma) convolved with
/// Lorentzian (HWHM gamma), normalized over the real line. sigma == 0 falls
/// back to the pure Lorentzian; gamma == 0 to the pure Gaussian.
inline double voigt_pdf(double x, double sigma, double gamma) {
    if (!(sigma >= 0.0) || !(gamma >= 0.0) || (sigma == 0.0 && gamma == 0.0))
        throw ParameterError("voigt_pdf requires sigma >= 0, gamma >= 0, not both zero");
    if (sigma == 0.0) return gamma / (kPi * (x * x + gamma * gamma));
    const double inv = 1.0 / (sigma * 1.4142135623730950488016887242097);
    return faddeeva_re(x * inv, gamma * inv) * inv * detail::kInvSqrtPi;
}

/// Parameters of a wrapped Voigt phase density.
/// k_max sets the minimum number of explicit wrap images on each side.
struct WrappedVoigtParams {
    double mu_v = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    int k_max = 10;
};

/// Wrapped Voigt density on [-pi, pi): sum of Voigt images at phi + 2*pi*k.
///
/// Images beyond the explicit window are not dropped: the Lorentzian tail
/// falls off only as 1/x^2, so truncation at fixed k would lose mass of order
/// gamma/k. The remainder is summed analytically via polygamma functions
/// using V(x) ~ (gamma/pi) x^-2 (1 + (3 sigma^2 - gamma^2) x^-2 + ...),
/// keeping the density normalized to ~1e-8 for any parameter values.
inline double wrapped_voigt_pdf(double phi, const WrappedVoigtParams& p) {
    if (!(p.sigma >= 0.0) || !(p.gamma >= 0.0) || (p.sigma == 0.0 && p.gamma == 0.0))
        throw ParameterError("wrapped_voigt_pdf requires sigma >= 0, gamma >= 0, not both zero");
    if (p.k_max < 1) throw ParameterError("wrapped_voigt_pdf requires k_max >= 1");

    const double u = wrap_angle(phi - p.mu_v);

    // Wide Gaussian component: the Fourier form 1 + 2 sum_m rho_m cos(m u),
    // rho_m = exp(-m^2 sigma^2 / 2 - gamma m), needs only a few terms exactly
    // where the image sum would need hundreds.
    if (p.sigma >= 1.0) {
        double acc = 1.0;
        for (int m = 1; m <= 64; ++m) {
            double rho = std::exp(-0.5 * m * m * p.sigma * p.sigma - p.gamma * m);
            if (rho < 1e-18) break;
            acc += 2.0 * rho * std::cos(m * u);
        }
        return acc / kTwoPi;
    }

    // Enough images that the Gaussian part has fully decayed at the edge.
    int k_need = static_cast<int>(std::ceil((8.0 * p.sigma + kPi) / kTwoPi));
    const int K = p.k_max > k_need ? p.k_max : k_need;

    double sum = 0.0;
    for (int k = -K; k <= K; ++k) sum += voigt_pdf(u + kTwoPi * k, p.sigma, p.gamma);

    if (p.gamma > 0.0) {
        const double v = u / kTwoPi;
        const double lead = p.gamma / (4.0 * kPi * kPi * kPi) *
                            (trigamma(K + 1 + v) + trigamma(K + 1 - v));
        const double c4 = kTwoPi * kTwoPi * kTwoPi * kTwoPi;  // (2 pi)^4
        const double nlo = p.gamma / kPi * (3.0 * p.sigma * p.sigma - p.gamma * p.gamma) / c4 / 6.0 *
                           (polygamma3(K + 1 + v) + polygamma3(K + 1 - v));
        sum += lead + nlo;
    }
    return sum;
}

}  // namespace qrlock
