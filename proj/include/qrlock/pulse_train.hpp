#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qrlock/phase_dist.hpp"
#include "qrlock/rng.hpp"
#include "qrlock/sim_config.hpp"

namespace qrlock {

/// Per-pulse ground truth of a synthetic train.
struct PulseTrain {
    std::vector<double> true_phases;  // wrapped to [-pi, pi)
    std::vector<double> chirp_rates;  // rad/s, applied within each pulse
    std::uint64_t samples_per_period = 0;
    double sample_period_s = 0.0;
    double on_window_s = 0.0;
};

/// Draw one independent phase per pulse. Each pulse gets its own RNG
/// substream, so the train is identical for any thread count or pulse order.
inline PulseTrain generate_pulse_train(const SimConfig& cfg, const PhaseDistribution& dist) {
    cfg.validate();
    PulseTrain train;
    train.samples_per_period = cfg.samples_per_period();
    train.sample_period_s = cfg.sample_period_s();
    train.on_window_s = cfg.on_window_s();
    train.true_phases.resize(cfg.n_pulses);
    train.chirp_rates.assign(cfg.n_pulses, cfg.chirp_rate_rad_per_s);
    for (std::uint64_t n = 0; n < cfg.n_pulses; ++n) {
        Rng rng = Rng::stream(cfg.seed, streams::kPulsePhase, n);
        train.true_phases[n] = dist.sample(rng);
    }
    return train;
}

/// Local oscillator: fixed amplitude, slow bounded phase wander.
struct LoModel {
    double amplitude = 0.5;
    std::vector<double> phase_per_pulse;
};

/// Random-walk LO phase, rescaled so the maximum excursion from the first
/// pulse equals lo_drift_bound_rad. Constant within each pulse (the walk is
/// slow compared to the 25 ns period).
inline LoModel generate_lo_model(const SimConfig& cfg) {
    cfg.validate();
    LoModel lo;
    lo.amplitude = cfg.lo_amplitude;
    lo.phase_per_pulse.assign(cfg.n_pulses, 0.0);
    if (cfg.lo_drift_bound_rad <= 0.0 || cfg.n_pulses < 2) return lo;

    Rng rng = Rng::stream(cfg.seed, streams::kLoDrift, 0);
    double w = 0.0, peak = 0.0;
    for (std::uint64_t n = 1; n < cfg.n_pulses; ++n) {
        w += rng.gaussian();
        lo.phase_per_pulse[n] = w;
        double a = std::abs(w);
        if (a > peak) peak = a;
    }
    if (peak > 0.0) {
        double scale = cfg.lo_drift_bound_rad / peak;
        for (auto& p : lo.phase_per_pulse) p *= scale;
    }
    return lo;
}

}  // namespace qrlock
