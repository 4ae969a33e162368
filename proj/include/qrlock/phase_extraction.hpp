#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"
#include "qrlock/segmentation.hpp"

namespace qrlock {

/// Instantaneous phase from the two quadrature currents, in [-pi, pi).
/// Both channels exactly zero leaves the phase undefined.
inline double extract_phase(double i0, double i90) {
    if (i0 == 0.0 && i90 == 0.0)
        throw AnalysisError("phase undefined: both quadrature samples are zero");
    double phi = std::atan2(i90, i0);
    if (phi >= kPi) phi = -kPi;  // atan2 returns (-pi, pi]
    return phi;
}

/// Phase of every (pulse, sample) cell inside the analysis window.
/// Cells whose instantaneous magnitude falls below mask_frac * window peak are
/// marked invalid instead of contributing meaningless phases.
struct PulsePhaseMatrix {
    std::size_t n_pulses = 0;
    std::size_t width = 0;
    std::size_t window_lo = 0;
    double sample_period_s = 0.0;
    std::vector<double> phases;        // row-major n_pulses x width
    std::vector<std::uint8_t> valid;   // same shape

    double tau(std::size_t col) const {
        return (static_cast<double>(window_lo) + static_cast<double>(col)) * sample_period_s;
    }

    std::vector<double> column_phases(std::size_t col) const {
        std::vector<double> out;
        out.reserve(n_pulses);
        for (std::size_t n = 0; n < n_pulses; ++n)
            if (valid[n * width + col]) out.push_back(phases[n * width + col]);
        return out;
    }
};

inline PulsePhaseMatrix phase_matrix(const PulseSegments& seg, const SampleWindow& win,
                                     double mask_frac = 0.05) {
    if (!(mask_frac >= 0.0 && mask_frac < 1.0))
        throw ParameterError("mask_frac must be in [0, 1)");
    if (win.width() == 0) throw ParameterError("empty analysis window");

    PulsePhaseMatrix m;
    m.n_pulses = seg.n_pulses;
    m.width = win.width();
    m.window_lo = win.lo;
    m.sample_period_s = seg.sample_period_s();
    m.phases.assign(m.n_pulses * m.width, 0.0);
    m.valid.assign(m.n_pulses * m.width, 0);

    const double floor_mag = mask_frac * win.peak;
    for (std::size_t n = 0; n < seg.n_pulses; ++n) {
        auto r0 = seg.i0_row(n);
        auto r90 = seg.i90_row(n);
        for (std::size_t c = 0; c < m.width; ++c) {
            double a = r0[win.lo + c], b = r90[win.lo + c];
            if (std::hypot(a, b) < floor_mag) continue;
            m.phases[n * m.width + c] = extract_phase(a, b);
            m.valid[n * m.width + c] = 1;
        }
    }
    return m;
}

/// One phase per pulse from window-integrated quadratures. Integration acts
/// as a matched filter, so no per-sample masking is needed.
struct IntegratedPhases {
    std::vector<double> i0_sum;
    std::vector<double> i90_sum;
    std::vector<double> phases;
};

inline IntegratedPhases integrate_pulse(const PulseSegments& seg, const SampleWindow& win) {
    if (win.width() == 0) throw ParameterError("empty analysis window");
    IntegratedPhases out;
    out.i0_sum.resize(seg.n_pulses);
    out.i90_sum.resize(seg.n_pulses);
    out.phases.resize(seg.n_pulses);
    for (std::size_t n = 0; n < seg.n_pulses; ++n) {
        auto r0 = seg.i0_row(n);
        auto r90 = seg.i90_row(n);
        double s0 = 0.0, s90 = 0.0;
        for (std::size_t j = win.lo; j < win.hi; ++j) {
            s0 += r0[j];
            s90 += r90[j];
        }
        out.i0_sum[n] = s0;
        out.i90_sum[n] = s90;
        out.phases[n] = extract_phase(s0, s90);
    }
    return out;
}

}  // namespace qrlock
