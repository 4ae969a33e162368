#pragma once

#include <cmath>
#include <complex>
#include <string_view>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"
#include "qrlock/rng.hpp"
#include "qrlock/wrapped_voigt.hpp"

namespace qrlock {

enum class PhaseDistKind { Uniform, Delta, WrappedGaussian, WrappedCauchy, WrappedVoigt };

inline std::string_view to_string(PhaseDistKind k) {
    switch (k) {
        case PhaseDistKind::Uniform: return "uniform";
        case PhaseDistKind::Delta: return "delta";
        case PhaseDistKind::WrappedGaussian: return "wrapped_gaussian";
        case PhaseDistKind::WrappedCauchy: return "wrapped_cauchy";
        case PhaseDistKind::WrappedVoigt: return "wrapped_voigt";
    }
    return "unknown";
}

/// Distribution of the per-pulse optical phase on the circle.
struct PhaseDistribution {
    PhaseDistKind kind = PhaseDistKind::Uniform;
    double center = 0.0;
    double sigma = 0.0;  // Gaussian component std
    double gamma = 0.0;  // Lorentzian component HWHM

    static PhaseDistribution uniform() { return {}; }

    static PhaseDistribution delta(double center) {
        return {PhaseDistKind::Delta, wrap_angle(center), 0.0, 0.0};
    }

    static PhaseDistribution wrapped_gaussian(double center, double sigma) {
        if (!(sigma > 0.0)) throw ParameterError("wrapped_gaussian requires sigma > 0");
        return {PhaseDistKind::WrappedGaussian, wrap_angle(center), sigma, 0.0};
    }

    static PhaseDistribution wrapped_cauchy(double center, double gamma) {
        if (!(gamma > 0.0)) throw ParameterError("wrapped_cauchy requires gamma > 0");
        return {PhaseDistKind::WrappedCauchy, wrap_angle(center), 0.0, gamma};
    }

    static PhaseDistribution wrapped_voigt(double center, double sigma, double gamma) {
        if (!(sigma >= 0.0) || !(gamma >= 0.0) || (sigma == 0.0 && gamma == 0.0))
            throw ParameterError("wrapped_voigt requires sigma >= 0, gamma >= 0, not both zero");
        return {PhaseDistKind::WrappedVoigt, wrap_angle(center), sigma, gamma};
    }

    double pdf(double theta) const {
        switch (kind) {
            case PhaseDistKind::Uniform:
                return 1.0 / kTwoPi;
            case PhaseDistKind::Delta:
                throw ParameterError("delta distribution has no density");
            case PhaseDistKind::WrappedGaussian:
                return wrapped_voigt_pdf(theta, {center, sigma, 0.0});
            case PhaseDistKind::WrappedCauchy: {
                double rho = std::exp(-gamma);
                double d = 1.0 + rho * rho - 2.0 * rho * std::cos(theta - center);
                return (1.0 - rho * rho) / (kTwoPi * d);
            }
            case PhaseDistKind::WrappedVoigt:
                return wrapped_voigt_pdf(theta, {center, sigma, gamma});
        }
        throw ParameterError("unknown distribution kind");
    }

    /// One draw, wrapped to [-pi, pi).
    double sample(Rng& rng) const {
        switch (kind) {
            case PhaseDistKind::Uniform:
                return rng.uniform(-kPi, kPi);
            case PhaseDistKind::Delta:
                return wrap_angle(center);
            case PhaseDistKind::WrappedGaussian:
                return wrap_angle(center + sigma * rng.gaussian());
            case PhaseDistKind::WrappedCauchy:
                return wrap_angle(center + gamma * std::tan(kPi * (rng.uniform01() - 0.5)));
            case PhaseDistKind::WrappedVoigt:
                return wrap_angle(center + sigma * rng.gaussian() +
                                  gamma * std::tan(kPi * (rng.uniform01() - 0.5)));
        }
        throw ParameterError("unknown distribution kind");
    }

    /// E[exp(i j theta)], closed form for every kind.
    std::complex<double> circular_moment(int j) const {
        if (j == 0) return {1.0, 0.0};
        double aj = std::abs(static_cast<double>(j));
        double damp;
        switch (kind) {
            case PhaseDistKind::Uniform:
                return {0.0, 0.0};
            case PhaseDistKind::Delta:
                damp = 1.0;
                break;
            case PhaseDistKind::WrappedGaussian:
                damp = std::exp(-0.5 * aj * aj * sigma * sigma);
                break;
            case PhaseDistKind::WrappedCauchy:
                damp = std::exp(-gamma * aj);
                break;
            case PhaseDistKind::WrappedVoigt:
                damp = std::exp(-0.5 * aj * aj * sigma * sigma - gamma * aj);
                break;
            default:
                throw ParameterError("unknown distribution kind");
        }
        return std::polar(damp, j * center);
    }
};

/// Response of the slave laser to injected light: maps received power to the
/// concentration of the locked phase distribution.
struct LockingCalibration {
    double kappa_ref = 30.0;    // concentration at p_ref_dbm with full coupling
    double p_ref_dbm = -40.0;
    double exponent = 0.5;      // kappa grows as (linear power)^exponent
    double lock_phase_rad = 0.0;
};

/// Phase distribution of a gain-switched laser seeded with `power_dbm` of
/// injected light at polarization coupling efficiency `eta` in [0, 1].
/// Vanishing injection recovers the uniform (fully random) distribution.
inline PhaseDistribution locking_distribution(double power_dbm, double eta,
                                              const LockingCalibration& cal = {}) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("coupling efficiency must be in [0, 1]");
    if (!(cal.kappa_ref >= 0.0)) throw ParameterError("kappa_ref must be non-negative");
    if (!(cal.exponent > 0.0)) throw ParameterError("calibration exponent must be positive");

    double lin = eta * std::pow(10.0, (power_dbm - cal.p_ref_dbm) / 10.0);
    double kappa = cal.kappa_ref * std::pow(lin, cal.exponent);
    if (!(kappa > 1e-9)) return PhaseDistribution::uniform();
    return PhaseDistribution::wrapped_gaussian(cal.lock_phase_rad, 1.0 / std::sqrt(kappa));
}

}  // namespace qrlock
