#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qrlock/parallel.hpp"
#include "qrlock/pulse_train.hpp"
#include "qrlock/rng.hpp"
#include "qrlock/sim_config.hpp"
#include "qrlock/waveform.hpp"

namespace qrlock {

/// Detect a pulse train through a 90-degree optical hybrid with two balanced
/// photodiode pairs.
///
/// Port intensities are built from the actual field sums: the first pair sees
/// (E_S + E_LO, E_S - E_LO) and yields the cosine current, the second sees the
/// signal arm retarded by a quarter wave, (e^{-i pi/2} E_S +- E_LO), and
/// yields the sine current. For matched gains
///   i0  = 2 a_S a_LO cos(theta_S - theta_LO)
///   i90 = 2 a_S a_LO sin(theta_S - theta_LO).
/// detector_imbalance applies gains (1 +- imbalance) inside each pair, leaking
/// the common-mode intensity into the outputs. Per-pulse noise substreams keep
/// the result identical for any thread count.
inline WaveformPair synthesize_heterodyne(const PulseTrain& train, const LoModel& lo,
                                          const SimConfig& cfg, int threads = 1) {
    cfg.validate();
    const std::size_t n_pulses = train.true_phases.size();
    if (n_pulses == 0) throw ParameterError("pulse train is empty");
    if (lo.phase_per_pulse.size() != n_pulses)
        throw ParameterError("LO model does not match pulse train length");

    const std::size_t period = train.samples_per_period;
    const double dt = train.sample_period_s;

    // The envelope repeats every period; sample it once.
    std::vector<double> env(period);
    for (std::size_t j = 0; j < period; ++j)
        env[j] = cfg.signal_amplitude * envelope_value(cfg, static_cast<double>(j) * dt);

    WaveformPair wf;
    wf.sample_period_s = dt;
    wf.i0_v.resize(n_pulses * period);
    wf.i90_v.resize(n_pulses * period);

    const double g_plus = 1.0 + cfg.detector_imbalance;
    const double g_minus = 1.0 - cfg.detector_imbalance;

    parallel_for(n_pulses, threads, [&](std::size_t n) {
        const double theta0 = train.true_phases[n];
        const double chirp = train.chirp_rates[n];
        const double a_lo = lo.amplitude;
        const std::complex<double> e_lo = std::polar(a_lo, lo.phase_per_pulse[n]);
        Rng noise = Rng::stream(cfg.seed, streams::kNoise, n);
        double* out0 = wf.i0_v.data() + n * period;
        double* out90 = wf.i90_v.data() + n * period;

        for (std::size_t j = 0; j < period; ++j) {
            const double theta = theta0 + chirp * (static_cast<double>(j) * dt);
            const std::complex<double> e_s = std::polar(env[j], theta);
            const std::complex<double> e_s90{e_s.imag(), -e_s.real()};  // e^{-i pi/2} E_S

            const double p1 = 0.5 * std::norm(e_s + e_lo);
            const double p2 = 0.5 * std::norm(e_s - e_lo);
            const double p3 = 0.5 * std::norm(e_s90 + e_lo);
            const double p4 = 0.5 * std::norm(e_s90 - e_lo);

            double v0 = g_plus * p1 - g_minus * p2;
            double v90 = g_plus * p3 - g_minus * p4;
            if (cfg.noise_rms_v > 0.0) {
                v0 += cfg.noise_rms_v * noise.gaussian();
                v90 += cfg.noise_rms_v * noise.gaussian();
            }
            out0[j] = v0;
            out90[j] = v90;
        }
    });
    return wf;
}

}  // namespace qrlock
