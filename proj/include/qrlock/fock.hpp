#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qrlock/errors.hpp"
#include "qrlock/phase_dist.hpp"
#include "qrlock/quadrature.hpp"
#include "qrlock/special.hpp"
#include "qrlock/wrapped_voigt.hpp"

namespace qrlock {

/// Photon-number (Fock) basis density matrix of a phase-mixed coherent state,
/// truncated at n_max photons.
struct DensityMatrix {
    int n_max = 0;
    double mean_photons = 0.0;
    double trace_deficit = 0.0;  // Poisson mass beyond the truncation
    std::vector<std::complex<double>> elements;  // (n_max+1)^2 row-major

    int dim() const { return n_max + 1; }

    std::complex<double> at(int n, int m) const {
        return elements[static_cast<std::size_t>(n) * dim() + static_cast<std::size_t>(m)];
    }

    std::complex<double>& at(int n, int m) {
        return elements[static_cast<std::size_t>(n) * dim() + static_cast<std::size_t>(m)];
    }

    double trace() const {
        double t = 0.0;
        for (int n = 0; n <= n_max; ++n) t += at(n, n).real();
        return t;
    }
};

namespace detail {

// rho_nm = exp(-mu) mu^{(n+m)/2} / sqrt(n! m!) * c_{n-m}, with c_j the j-th
// circular moment of the phase density. c_{-j} = conj(c_j) keeps the matrix
// exactly Hermitian; positivity is inherited from the coherent-state mixture.
inline DensityMatrix assemble_density(double mu, int n_max,
                                      const std::vector<std::complex<double>>& moments) {
    DensityMatrix rho;
    rho.n_max = n_max;
    rho.mean_photons = mu;
    rho.elements.assign(static_cast<std::size_t>(n_max + 1) * (n_max + 1), {0.0, 0.0});

    if (mu == 0.0) {
        rho.at(0, 0) = 1.0;
        return rho;
    }
    const double log_mu = std::log(mu);
    std::vector<double> half_log_weight(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        half_log_weight[static_cast<std::size_t>(n)] =
            -0.5 * mu + 0.5 * (n * log_mu - log_factorial(n));

    double trace = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        for (int m = 0; m <= n_max; ++m) {
            int j = n - m;
            std::complex<double> c = j >= 0 ? moments[static_cast<std::size_t>(j)]
                                            : std::conj(moments[static_cast<std::size_t>(-j)]);
            double w = std::exp(half_log_weight[static_cast<std::size_t>(n)] +
                                half_log_weight[static_cast<std::size_t>(m)]);
            rho.at(n, m) = w * c;
        }
        trace += rho.at(n, n).real();
    }
    rho.trace_deficit = 1.0 - trace;
    if (rho.trace_deficit < 0.0) rho.trace_deficit = 0.0;
    return rho;
}

}  // namespace detail

/// Density matrix for a known phase distribution. Moments come from periodic
/// quadrature of the density; the delta distribution uses its closed form.
inline DensityMatrix density_matrix(double mu, const PhaseDistribution& dist, int n_max,
                                    double quad_tol = 1e-10) {
    if (!(mu >= 0.0)) throw ParameterError("mean photon number must be non-negative");
    if (n_max < 0 || n_max > 4096) throw ParameterError("n_max must be in [0, 4096]");

    std::vector<std::complex<double>> moments(static_cast<std::size_t>(n_max) + 1);
    for (int j = 0; j <= n_max; ++j) {
        if (dist.kind == PhaseDistKind::Delta) {
            moments[static_cast<std::size_t>(j)] = dist.circular_moment(j);
        } else {
            moments[static_cast<std::size_t>(j)] = integrate_periodic(
                [&](double theta) {
                    return dist.pdf(theta) * std::polar(1.0, j * theta);
                },
                quad_tol);
        }
    }
    return detail::assemble_density(mu, n_max, moments);
}

/// Density matrix from a fitted wrapped Voigt phase density.
inline DensityMatrix density_matrix(double mu, const WrappedVoigtParams& fitted, int n_max,
                                    double quad_tol = 1e-10) {
    if (!(mu >= 0.0)) throw ParameterError("mean photon number must be non-negative");
    if (n_max < 0 || n_max > 4096) throw ParameterError("n_max must be in [0, 4096]");

    std::vector<std::complex<double>> moments(static_cast<std::size_t>(n_max) + 1);
    for (int j = 0; j <= n_max; ++j)
        moments[static_cast<std::size_t>(j)] = integrate_periodic(
            [&](double theta) {
                return wrapped_voigt_pdf(theta, fitted) * std::polar(1.0, j * theta);
            },
            quad_tol);
    return detail::assemble_density(mu, n_max, moments);
}

/// Largest off-diagonal magnitude; zero for a phase-randomized source.
inline double max_offdiag(const DensityMatrix& rho) {
    double worst = 0.0;
    for (int n = 0; n <= rho.n_max; ++n)
        for (int m = 0; m <= rho.n_max; ++m) {
            if (n == m) continue;
            double a = std::abs(rho.at(n, m));
            if (a > worst) worst = a;
        }
    return worst;
}

}  // namespace qrlock
