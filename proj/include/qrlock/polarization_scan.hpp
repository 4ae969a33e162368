#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrlock/heterodyne.hpp"
#include "qrlock/parallel.hpp"
#include "qrlock/phase_dist.hpp"
#include "qrlock/phase_extraction.hpp"
#include "qrlock/qrel.hpp"
#include "qrlock/segmentation.hpp"
#include "qrlock/stokes.hpp"

namespace qrlock {

/// Single-photon detector watching the light reflected back out of the
/// injection port. Coupled power goes into the laser; the rest reflects.
struct SpdConfig {
    double floor_rate_cps = 500.0;   // rate at perfect coupling (stray + dark)
    double peak_rate_cps = 50000.0;  // extra rate at full mismatch
    double dwell_s = 0.2;

    void validate() const {
        if (!(floor_rate_cps >= 0.0) || !(peak_rate_cps >= 0.0) || !(dwell_s > 0.0))
            throw ParameterError("SPD rates must be non-negative and dwell positive");
    }
};

/// Poisson counts over one dwell at rate floor + peak * (1 - eta).
inline std::uint64_t reflected_counts(const StokesState& state, const StokesState& optimal,
                                      const SpdConfig& spd, Rng& rng) {
    spd.validate();
    double eta = coupling_efficiency(state, optimal);
    return rng.poisson((spd.floor_rate_cps + spd.peak_rate_cps * (1.0 - eta)) * spd.dwell_s);
}

struct PolScanConfig {
    std::size_t grid_points = 256;
    double power_dbm = -60.0;
    StokesState optimal{0.0, 0.0, 1.0};
    LockingCalibration calib;
    SimConfig sim;      // per-point simulation template; seeds are derived
    WindowSpec window;
    int bins = 64;
    FitOptions fit;
    int qrel_grid = 4096;
    SpdConfig spd;
    int threads = 1;

    void validate() const {
        if (grid_points < 16) throw ParameterError("polarization scan needs at least 16 points");
        if (std::abs(optimal.norm() - 1.0) > 1e-9)
            throw ParameterError("optimal polarization must be a unit Stokes vector");
        sim.validate();
        spd.validate();
    }
};

struct PolScanPoint {
    StokesState state;
    double eta = 0.0;
    double q_rel = 0.0;
    std::uint64_t spd_counts = 0;
    bool ok = false;
    std::string failure;
};

struct PolScanResult {
    std::vector<PolScanPoint> points;
    std::size_t argmin_q = 0;       // over points with ok
    std::size_t argmin_counts = 0;  // over all points
    double cell_angle = 0.0;        // lattice resolution, for argmin comparisons
};

/// Map q and reflected SPD counts over the Poincare sphere.
///
/// Each lattice point runs the reduced pipeline: locked-phase simulation at
/// coupling eta, heterodyne detection, window-integrated phases, one fit, q.
/// Both maps should bottom out at the optimal polarization; the SPD map is
/// the cheap experimental proxy for the full q map.
inline PolScanResult scan_sphere(const PolScanConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto lattice = fibonacci_sphere(cfg.grid_points);

    PolScanResult result;
    result.points.resize(lattice.size());
    result.cell_angle = lattice_cell_angle(lattice);

    parallel_for(lattice.size(), cfg.threads, [&](std::size_t i) {
        PolScanPoint& pt = result.points[i];
        pt.state = lattice[i];
        pt.eta = coupling_efficiency(pt.state, cfg.optimal);

        Rng spd_rng = Rng::stream(seed, streams::kSpdCounts, i);
        pt.spd_counts = reflected_counts(pt.state, cfg.optimal, cfg.spd, spd_rng);

        try {
            SimConfig sim = cfg.sim;
            sim.seed = mix_seed(mix_seed(seed, streams::kScanPoint), i);
            auto dist = locking_distribution(cfg.power_dbm, pt.eta, cfg.calib);
            auto train = generate_pulse_train(sim, dist);
            auto lo = generate_lo_model(sim);
            auto wf = synthesize_heterodyne(train, lo, sim);
            auto seg = segment_pulses(wf, sim.rep_rate_hz);
            auto win = select_window(seg, cfg.window);
            auto integrated = integrate_pulse(seg, win);
            auto hist = PhaseHistogram::from_phases(integrated.phases, cfg.bins);
            auto fit = fit_wrapped_voigt(hist, std::nullopt, cfg.fit);
            pt.q_rel = qrel_from_pdf(fit.params, cfg.qrel_grid);
            pt.ok = true;
        } catch (const AnalysisError& e) {
            pt.failure = e.what();
        }
    });

    bool any_ok = false;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& pt = result.points[i];
        if (pt.spd_counts < result.points[result.argmin_counts].spd_counts)
            result.argmin_counts = i;
        if (!pt.ok) continue;
        if (!any_ok || pt.q_rel < result.points[result.argmin_q].q_rel) {
            result.argmin_q = i;
            any_ok = true;
        }
    }
    if (!any_ok) throw AnalysisError("polarization scan failed at every lattice point");
    return result;
}

}  // namespace qrlock
