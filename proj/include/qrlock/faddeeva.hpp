#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "qrlock/errors.hpp"

namespace qrlock {

namespace detail {

inline constexpr double kInvSqrtPi = 0.5641895835477562869480794515607725858;

// Weideman rational approximation, N = 36, L = sqrt(N/sqrt(2)).
// Fourier coefficients of exp(-t^2)(L^2+t^2) under t = L*tan(theta/2).
inline constexpr double kWeidemanL = 5.045378491522287258187;
inline constexpr std::array<double, 36> kWeidemanA = {
    2.740745027409860255022,     2.445378492851920870931,     2.019397643611350638281,
    1.540162578815365493760,     1.081358037176588962813,     0.6956621918971002729987,
    0.4073424189503342968798,    0.2150163632010740941125,    0.1008429337184796685180,
    0.04105104301657708811404,   0.01389825376325147280197,   0.003548444708699561289915,
    0.0004629031693998175069964, -0.0001139663064446326880171, -0.00008817797141863541933167,
    -0.00002174118656552707915312, 0.000001418705847874244504205, 0.000002765408665743547025177,
    6.741655663822086140020e-7,  -1.289484292024586689096e-7, -1.130315719425847751824e-7,
    -1.096227786559049634235e-8, 1.188388726736611776247e-8,  3.773443123698583081511e-9,
    -9.092238350363812064208e-10, -6.634847173398884138129e-10, 3.197191945112926675884e-11,
    9.939318013576687889712e-11, 6.346271847688271886459e-12, -1.431251934983383641684e-11,
    -2.117068348239302669127e-12, 2.098044988097297967268e-12, 4.431618285200439300428e-13,
    -3.238862088097312207320e-13, -8.046291993603708064952e-14, 5.356399489824159465351e-14};

// Laplace continued fraction, backward recurrence. Accurate for |z| >~ 6;
// used beyond the Weideman disk.
inline std::complex<double> faddeeva_cf(std::complex<double> z) {
    std::complex<double> t{0.0, 0.0};
    for (int k = 20; k >= 1; --k) t = (0.5 * k) / (z - t);
    return std::complex<double>{0.0, kInvSqrtPi} / (z - t);
}

inline std::complex<double> faddeeva_weideman(std::complex<double> z) {
    const std::complex<double> iz{-z.imag(), z.real()};
    const std::complex<double> denom = kWeidemanL - iz;
    const std::complex<double> r = (kWeidemanL + iz) / denom;
    std::complex<double> p{0.0, 0.0};
    for (auto it = kWeidemanA.rbegin(); it != kWeidemanA.rend(); ++it) p = p * r + *it;
    return 2.0 * p / (denom * denom) + kInvSqrtPi / denom;
}

}  // namespace detail

/// Re w(x + iy) for y >= 0, where w(z) = exp(-z^2) erfc(-iz).
///
/// Exact exp(-x^2) on the real axis, continued fraction for |z| > 12,
/// Weideman N=36 otherwise. Relative error stays below ~1e-10 wherever the
/// result is not dominated by the exponentially small exp(-x^2) ridge.
inline double faddeeva_re(double x, double y) {
    if (!(y >= 0.0)) throw ParameterError("faddeeva_re requires y >= 0");
    if (y == 0.0) {
        double x2 = x * x;
        return x2 < 745.0 ? std::exp(-x2) : 0.0;
    }
    if (x * x + y * y > 144.0) return detail::faddeeva_cf({x, y}).real();
    return detail::faddeeva_weideman({x, y}).real();
}

}  // namespace qrlock
