#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qrlock/errors.hpp"
#include "qrlock/waveform.hpp"

namespace qrlock {

/// Non-owning view of a waveform cut into equal pulse periods.
/// Valid only while the source WaveformPair is alive.
struct PulseSegments {
    const WaveformPair* wf = nullptr;
    std::size_t n_pulses = 0;
    std::size_t samples_per_period = 0;
    std::size_t start_offset = 0;

    double sample_period_s() const { return wf->sample_period_s; }

    std::span<const double> i0_row(std::size_t n) const {
        return {wf->i0_v.data() + start_offset + n * samples_per_period, samples_per_period};
    }
    std::span<const double> i90_row(std::size_t n) const {
        return {wf->i90_v.data() + start_offset + n * samples_per_period, samples_per_period};
    }
};

inline PulseSegments segment_pulses(const WaveformPair& wf, double rep_rate_hz,
                                    double trigger_offset_s = 0.0) {
    wf.validate();
    if (!(rep_rate_hz > 0.0)) throw ParameterError("rep_rate_hz must be positive");
    if (!(trigger_offset_s >= 0.0)) throw ParameterError("trigger offset must be non-negative");

    const double ratio = 1.0 / (rep_rate_hz * wf.sample_period_s);
    auto period = static_cast<std::size_t>(std::floor(ratio + 1e-9));
    if (period < 2) throw ParameterError("fewer than 2 samples per period");

    auto start = static_cast<std::size_t>(std::llround(trigger_offset_s / wf.sample_period_s));
    if (start >= wf.size()) throw AnalysisError("trigger offset beyond end of waveform");

    PulseSegments seg;
    seg.wf = &wf;
    seg.samples_per_period = period;
    seg.start_offset = start;
    seg.n_pulses = (wf.size() - start) / period;
    if (seg.n_pulses == 0) throw AnalysisError("waveform shorter than one pulse period");
    return seg;
}

struct WindowSpec {
    double threshold_frac = 0.5;  // of the peak mean magnitude
    bool explicit_window = false;
    double t_lo_s = 0.0;  // used when explicit_window, relative to period start
    double t_hi_s = 0.0;
};

/// Half-open sample range [lo, hi) inside the period, plus the magnitude
/// profile it was derived from.
struct SampleWindow {
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::vector<double> mean_magnitude;  // per sample of the period
    double peak = 0.0;

    std::size_t width() const { return hi - lo; }
};

/// Pick the analysis window from the pulse-averaged quadrature magnitude
/// sqrt(i0^2 + i90^2): the maximal contiguous run around the peak that stays
/// above threshold_frac * peak. The average magnitude survives uniformly
/// random phases, where averaging the signed channels would cancel.
inline SampleWindow select_window(const PulseSegments& seg, const WindowSpec& spec = {}) {
    SampleWindow win;
    const std::size_t period = seg.samples_per_period;
    win.mean_magnitude.assign(period, 0.0);
    for (std::size_t n = 0; n < seg.n_pulses; ++n) {
        auto r0 = seg.i0_row(n);
        auto r90 = seg.i90_row(n);
        for (std::size_t j = 0; j < period; ++j)
            win.mean_magnitude[j] += std::hypot(r0[j], r90[j]);
    }
    std::size_t peak_at = 0;
    for (std::size_t j = 0; j < period; ++j) {
        win.mean_magnitude[j] /= static_cast<double>(seg.n_pulses);
        if (win.mean_magnitude[j] > win.mean_magnitude[peak_at]) peak_at = j;
    }
    win.peak = win.mean_magnitude[peak_at];

    if (spec.explicit_window) {
        if (!(spec.t_lo_s >= 0.0) || !(spec.t_hi_s > spec.t_lo_s))
            throw ParameterError("explicit window requires 0 <= t_lo < t_hi");
        auto lo = static_cast<std::size_t>(std::llround(spec.t_lo_s / seg.sample_period_s()));
        auto hi = static_cast<std::size_t>(std::llround(spec.t_hi_s / seg.sample_period_s()));
        if (hi > period) throw ParameterError("explicit window extends past the pulse period");
        if (lo >= hi) throw ParameterError("explicit window is empty");
        win.lo = lo;
        win.hi = hi;
        return win;
    }

    if (!(spec.threshold_frac > 0.0 && spec.threshold_frac < 1.0))
        throw ParameterError("threshold_frac must be in (0, 1)");
    if (!(win.peak > 0.0)) throw AnalysisError("window selection failed: no signal magnitude");

    const double threshold = spec.threshold_frac * win.peak;
    std::size_t lo = peak_at, hi = peak_at + 1;
    while (lo > 0 && win.mean_magnitude[lo - 1] >= threshold) --lo;
    while (hi < period && win.mean_magnitude[hi] >= threshold) ++hi;
    win.lo = lo;
    win.hi = hi;
    return win;
}

}  // namespace qrlock
