#pragma once

// Reference implementations for tests. Deliberately independent of the
// library code paths they are used to check: different algorithms, no shared
// helpers beyond the standard library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Adaptive Simpson quadrature (recursive bisection with Richardson check).
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    // Forced initial splits: equispaced start points can alias the zeros of a
    // periodic integrand and fake convergence.
    if (depth <= 42 && std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::adapt(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Voigt profile straight from its definition: Gaussian x Lorentzian
// convolution, integrated over +-14 sigma of the Gaussian.
inline double voigt_by_convolution(double x, double sigma, double gamma, double tol = 1e-13) {
    if (sigma <= 0.0) throw std::invalid_argument("convolution oracle needs sigma > 0");
    auto integrand = [&](double t) {
        double g = std::exp(-t * t / (2.0 * sigma * sigma)) /
                   (sigma * std::sqrt(2.0 * kPi));
        double l = gamma > 0.0 ? gamma / (kPi * ((x - t) * (x - t) + gamma * gamma)) : 0.0;
        return g * l;
    };
    if (gamma == 0.0)
        return std::exp(-x * x / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * kPi));
    double half = 14.0 * sigma;
    // Split at the Lorentzian peak so the adaptive rule sees it.
    double lo = -half, hi = half;
    double split = std::clamp(x, lo, hi);
    return integrate(integrand, lo, split, tol) + integrate(integrand, split, hi, tol);
}

// Wrapped Voigt via its Fourier series: (1/2pi)(1 + 2 sum e^{-m^2 s^2/2 - g m} cos(m u)).
inline double wrapped_voigt_series(double phi, double mu, double sigma, double gamma) {
    double u = phi - mu;
    double acc = 1.0;
    for (int m = 1; m < 100000; ++m) {
        double damp = std::exp(-0.5 * m * m * sigma * sigma - gamma * m);
        if (damp < 1e-18) break;
        acc += 2.0 * damp * std::cos(m * u);
    }
    return acc / (2.0 * kPi);
}

// Wrapped Gaussian by direct image sum (theta function, spatial form).
inline double wrapped_gaussian_images(double phi, double mu, double sigma) {
    double u = phi - mu;
    u -= 2.0 * kPi * std::round(u / (2.0 * kPi));
    double acc = 0.0;
    int K = static_cast<int>(std::ceil((10.0 * sigma + kPi) / (2.0 * kPi))) + 1;
    for (int k = -K; k <= K; ++k) {
        double d = u + 2.0 * kPi * k;
        acc += std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return acc / (sigma * std::sqrt(2.0 * kPi));
}

// Wrapped Cauchy closed form.
inline double wrapped_cauchy_pdf(double phi, double mu, double gamma) {
    double rho = std::exp(-gamma);
    return (1.0 - rho * rho) /
           (2.0 * kPi * (1.0 + rho * rho - 2.0 * rho * std::cos(phi - mu)));
}

// Kolmogorov-Smirnov distance between samples and a CDF given as a callable.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double c = cdf(samples[i]);
        worst = std::max(worst, std::abs(c - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return worst;
}

// Circular moment of a sample set, direct trigonometric sums.
inline std::complex<double> sample_circular_moment(const std::vector<double>& phases, int j) {
    double c = 0.0, s = 0.0;
    for (double p : phases) {
        c += std::cos(j * p);
        s += std::sin(j * p);
    }
    double n = static_cast<double>(phases.size());
    return {c / n, s / n};
}

}  // namespace oracle
