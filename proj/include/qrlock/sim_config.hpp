#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"

namespace qrlock {

enum class EnvelopeKind { RaisedCosine, Gaussian };

inline std::string_view to_string(EnvelopeKind k) {
    return k == EnvelopeKind::RaisedCosine ? "raised_cosine" : "gaussian";
}

/// Parameters of the synthetic gain-switched pulse train and its detection.
struct SimConfig {
    double rep_rate_hz = 40e6;
    double duty_cycle = 0.5;
    double sample_rate_hz = 50e9;
    std::uint64_t n_pulses = 8000;
    EnvelopeKind envelope = EnvelopeKind::RaisedCosine;
    double rise_time_s = 1e-9;            // raised-cosine edge width, inside the on-window
    double chirp_rate_rad_per_s = 0.0;    // intra-pulse frequency slide
    double noise_rms_v = 0.0;             // additive Gaussian noise per output channel
    double lo_drift_bound_rad = 5e-4;     // max LO phase excursion over the acquisition
    double detector_imbalance = 0.0;      // fractional gain mismatch of each balanced pair
    double signal_amplitude = 1.0;
    double lo_amplitude = 0.5;
    std::uint64_t seed = 1;

    double sample_period_s() const { return 1.0 / sample_rate_hz; }
    double period_s() const { return 1.0 / rep_rate_hz; }
    double on_window_s() const { return duty_cycle / rep_rate_hz; }
    double total_time_s() const { return static_cast<double>(n_pulses) / rep_rate_hz; }

    std::uint64_t samples_per_period() const {
        // 1e-9 guard absorbs FP dust when the ratio is an exact integer.
        return static_cast<std::uint64_t>(std::floor(sample_rate_hz / rep_rate_hz + 1e-9));
    }

    void validate() const {
        if (!(rep_rate_hz > 0.0)) throw ParameterError("rep_rate_hz must be positive");
        if (!(duty_cycle > 0.0 && duty_cycle < 1.0))
            throw ParameterError("duty_cycle must be in (0, 1)");
        if (!(sample_rate_hz > 0.0)) throw ParameterError("sample_rate_hz must be positive");
        if (samples_per_period() < 8)
            throw ParameterError("sample_rate_hz must give at least 8 samples per period");
        if (n_pulses == 0) throw ParameterError("n_pulses must be at least 1");
        if (!(rise_time_s >= 0.0)) throw ParameterError("rise_time_s must be non-negative");
        if (rise_time_s > 0.5 * on_window_s())
            throw ParameterError("rise_time_s must not exceed half the on-window");
        if (!(noise_rms_v >= 0.0)) throw ParameterError("noise_rms_v must be non-negative");
        if (!(lo_drift_bound_rad >= 0.0))
            throw ParameterError("lo_drift_bound_rad must be non-negative");
        if (!(detector_imbalance > -1.0 && detector_imbalance < 1.0))
            throw ParameterError("detector_imbalance must be in (-1, 1)");
        if (!(signal_amplitude > 0.0) || !(lo_amplitude > 0.0))
            throw ParameterError("field amplitudes must be positive");
        if (!std::isfinite(chirp_rate_rad_per_s))
            throw ParameterError("chirp_rate_rad_per_s must be finite");
    }
};

/// Pulse amplitude envelope at time tau after the period start, in [0, 1].
/// Zero outside the duty on-window by construction.
inline double envelope_value(const SimConfig& cfg, double tau) {
    const double t_on = cfg.on_window_s();
    if (tau < 0.0 || tau >= t_on) return 0.0;
    if (cfg.envelope == EnvelopeKind::Gaussian) {
        double mid = 0.5 * t_on, width = t_on / 6.0;
        double z = (tau - mid) / width;
        return std::exp(-0.5 * z * z);
    }
    const double r = cfg.rise_time_s;
    if (r <= 0.0) return 1.0;
    if (tau < r) return 0.5 * (1.0 - std::cos(kPi * tau / r));
    if (tau > t_on - r) return 0.5 * (1.0 - std::cos(kPi * (t_on - tau) / r));
    return 1.0;
}

}  // namespace qrlock
