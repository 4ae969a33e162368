#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qrlock/heterodyne.hpp"
#include "qrlock/parallel.hpp"
#include "qrlock/phase_dist.hpp"
#include "qrlock/phase_extraction.hpp"
#include "qrlock/qrel.hpp"
#include "qrlock/segmentation.hpp"
#include "qrlock/units.hpp"

namespace qrlock {

struct SweepOptions {
    std::vector<double> powers_dbm;  // strictly increasing
    LockingCalibration calib;
    SimConfig sim;            // template; per-point seeds are derived
    WindowSpec window;
    double mask_frac = 0.05;
    QRelOptions analysis;
    int threads = 1;

    void validate() const {
        if (powers_dbm.size() < 2) throw ParameterError("sweep needs at least 2 power points");
        for (std::size_t i = 1; i < powers_dbm.size(); ++i)
            if (!(powers_dbm[i] > powers_dbm[i - 1]))
                throw ParameterError("sweep powers must be strictly increasing");
        sim.validate();
    }
};

struct SweepPoint {
    double power_dbm = 0.0;
    bool ok = false;
    std::string failure;
    double q_rel_min = 0.0;
    double q_err = std::numeric_limits<double>::quiet_NaN();
    double q_integrated = 0.0;
    double q_integrated_err = std::numeric_limits<double>::quiet_NaN();
    double sigma_at_min = 0.0;  // fitted shape at the minimizing sampling time
    double gamma_at_min = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// q versus injected optical power. Each point runs the full pipeline
/// (simulate, segment, per-sample fits, bootstrap error at the minimum) plus
/// the window-integrated estimate. Failed points are flagged, not fatal.
inline SweepResult power_sweep(const SweepOptions& opts, std::uint64_t seed) {
    opts.validate();
    SweepResult result;
    result.points.resize(opts.powers_dbm.size());

    parallel_for(opts.powers_dbm.size(), opts.threads, [&](std::size_t i) {
        SweepPoint& pt = result.points[i];
        pt.power_dbm = opts.powers_dbm[i];
        try {
            SimConfig sim = opts.sim;
            sim.seed = mix_seed(mix_seed(seed, streams::kSweepPoint), i);
            auto dist = locking_distribution(pt.power_dbm, 1.0, opts.calib);
            auto train = generate_pulse_train(sim, dist);
            auto lo = generate_lo_model(sim);
            auto wf = synthesize_heterodyne(train, lo, sim);
            auto seg = segment_pulses(wf, sim.rep_rate_hz);
            auto win = select_window(seg, opts.window);

            QRelOptions analysis = opts.analysis;
            analysis.seed = sim.seed;
            auto matrix = phase_matrix(seg, win, opts.mask_frac);
            auto curve = qrel_timeseries(matrix, analysis);
            pt.q_rel_min = curve.q_rel_min;
            pt.q_err = curve.min_bootstrap.n_resamples > 0 ? curve.min_bootstrap.stddev
                                                           : std::numeric_limits<double>::quiet_NaN();
            pt.sigma_at_min = curve.points[curve.argmin].fit.sigma;
            pt.gamma_at_min = curve.points[curve.argmin].fit.gamma;

            auto integrated = integrate_pulse(seg, win);
            auto hist = PhaseHistogram::from_phases(integrated.phases, analysis.bins);
            auto fit = fit_wrapped_voigt(hist, std::nullopt, analysis.fit);
            pt.q_integrated = qrel_from_pdf(fit.params, analysis.grid_points);
            if (analysis.bootstrap != QRelOptions::Bootstrap::None) {
                auto boot = bootstrap_qrel(integrated.phases, analysis, 0x1000000ULL + i);
                pt.q_integrated_err = boot.stddev;
            }
            pt.ok = true;
        } catch (const AnalysisError& e) {
            pt.failure = e.what();
        }
    });
    bool any_ok = false;
    for (const auto& pt : result.points) any_ok = any_ok || pt.ok;
    if (!any_ok) throw AnalysisError("power sweep failed at every point");
    return result;
}

struct IsolationResult {
    double threshold_dbm = 0.0;
    double isolation_db = 0.0;
};

/// Attacker-power threshold where q (per-sample minimum) first drops below
/// q_target, linearly interpolated between sweep points, and the attenuation
/// needed to keep an attacker limited by the fiber damage threshold
/// lidt_watts below that power.
inline IsolationResult isolation_threshold(const SweepResult& sweep, double q_target,
                                           double lidt_watts) {
    if (!(q_target > 0.0 && q_target < 1.0)) throw ParameterError("q_target must be in (0, 1)");
    if (!(lidt_watts > 0.0)) throw ParameterError("lidt_watts must be positive");

    const SweepPoint* prev = nullptr;
    for (const auto& pt : sweep.points) {
        if (!pt.ok) continue;
        if (prev && prev->q_rel_min >= q_target && pt.q_rel_min < q_target) {
            double span = prev->q_rel_min - pt.q_rel_min;
            double frac = span > 0.0 ? (prev->q_rel_min - q_target) / span : 0.0;
            double threshold = prev->power_dbm + frac * (pt.power_dbm - prev->power_dbm);
            return {threshold, watts_to_dbm(lidt_watts) - threshold};
        }
        prev = &pt;
    }
    throw AnalysisError("no q_target crossing inside the swept power range");
}

}  // namespace qrlock
