#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrlock/errors.hpp"
#include "qrlock/phase_dist.hpp"
#include "qrlock/polarization_scan.hpp"
#include "qrlock/qrel.hpp"
#include "qrlock/segmentation.hpp"
#include "qrlock/sim_config.hpp"

namespace qrlock {

using ordered_json = nlohmann::ordered_json;

/// Which phase distribution drives the simulated source.
struct DistConfig {
    std::string kind = "uniform";  // uniform | delta | wrapped_gaussian |
                                   // wrapped_cauchy | wrapped_voigt | locked
    double center = 0.0;
    double sigma = 0.3;
    double gamma = 0.05;
    double power_dbm = -60.0;  // used by kind "locked"
    double eta = 1.0;          // polarization coupling for kind "locked"

    PhaseDistribution resolve(const LockingCalibration& calib) const {
        if (kind == "uniform") return PhaseDistribution::uniform();
        if (kind == "delta") return PhaseDistribution::delta(center);
        if (kind == "wrapped_gaussian") return PhaseDistribution::wrapped_gaussian(center, sigma);
        if (kind == "wrapped_cauchy") return PhaseDistribution::wrapped_cauchy(center, gamma);
        if (kind == "wrapped_voigt") return PhaseDistribution::wrapped_voigt(center, sigma, gamma);
        if (kind == "locked") return locking_distribution(power_dbm, eta, calib);
        throw ParameterError("unknown distribution kind: " + kind);
    }
};

struct AnalysisConfig {
    int bins = 64;
    double threshold_frac = 0.5;
    bool explicit_window = false;
    double window_lo_s = 0.0;
    double window_hi_s = 0.0;
    double mask_frac = 0.05;
    std::uint64_t tau_stride = 1;
    std::uint64_t min_samples = 100;
    int resamples = 50;
    std::string bootstrap = "argmin";  // none | argmin | all
    int grid_points = 4096;
    std::string method = "both";  // persample | integrated | both
    bool hist_bound = false;
    int hist_bound_bins = 16;
    double epsilon = 1e-10;
    int k_max = 10;
    bool poisson_weights = false;
    int max_iterations = 500;
    bool multistart = true;

    WindowSpec window_spec() const {
        WindowSpec w;
        w.threshold_frac = threshold_frac;
        w.explicit_window = explicit_window;
        w.t_lo_s = window_lo_s;
        w.t_hi_s = window_hi_s;
        return w;
    }

    FitOptions fit_options() const {
        FitOptions f;
        f.max_iterations = max_iterations;
        f.poisson_weights = poisson_weights;
        f.k_max = k_max;
        f.multistart = multistart;
        return f;
    }

    QRelOptions qrel_options(std::uint64_t seed, int threads) const {
        QRelOptions q;
        q.fit = fit_options();
        q.bins = bins;
        q.grid_points = grid_points;
        q.tau_stride = tau_stride;
        q.min_samples = min_samples;
        q.n_resamples = resamples;
        if (bootstrap == "none") q.bootstrap = QRelOptions::Bootstrap::None;
        else if (bootstrap == "argmin") q.bootstrap = QRelOptions::Bootstrap::ArgminOnly;
        else if (bootstrap == "all") q.bootstrap = QRelOptions::Bootstrap::All;
        else throw ParameterError("unknown bootstrap mode: " + bootstrap);
        q.seed = seed;
        q.threads = threads;
        return q;
    }
};

struct SweepSection {
    std::vector<double> powers_dbm = {-95, -90, -85, -80, -75, -70, -65, -60, -55, -50};
    double q_target = 0.5;
    double lidt_watts = 100.0;
};

struct ScanSection {
    std::uint64_t points = 256;
    double power_dbm = -50.0;
    std::array<double, 3> optimal = {0.0, 0.0, 1.0};
    SpdConfig spd;
};

struct FockSection {
    double mu = 0.5;
    int n_max = 20;
    double quad_tol = 1e-10;
};

/// Fully resolved configuration of one tool run. Execution-only knobs
/// (thread count, output paths) stay outside: they may not influence results,
/// so they are not part of the config identity.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string format = "text";  // waveform output format
    SimConfig sim;
    DistConfig dist;
    LockingCalibration calib;
    AnalysisConfig analysis;
    SweepSection sweep;
    ScanSection scan;
    FockSection fock;

    /// Simulation config with the run seed applied.
    SimConfig seeded_sim() const {
        SimConfig s = sim;
        s.seed = seed;
        return s;
    }
};

namespace detail {

[[noreturn]] inline void unknown_key(const std::string& section, const std::string& key) {
    throw ParameterError("unknown config key: " + section + "." + key);
}

template <typename T>
T as(const ordered_json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParameterError("bad value type for config key: " + where);
    }
}

}  // namespace detail

inline ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["format"] = c.format;
    j["sim"] = {{"rep_rate_hz", c.sim.rep_rate_hz},
                {"duty_cycle", c.sim.duty_cycle},
                {"sample_rate_hz", c.sim.sample_rate_hz},
                {"n_pulses", c.sim.n_pulses},
                {"envelope", std::string(to_string(c.sim.envelope))},
                {"rise_time_s", c.sim.rise_time_s},
                {"chirp_rate_rad_per_s", c.sim.chirp_rate_rad_per_s},
                {"noise_rms_v", c.sim.noise_rms_v},
                {"lo_drift_bound_rad", c.sim.lo_drift_bound_rad},
                {"detector_imbalance", c.sim.detector_imbalance},
                {"signal_amplitude", c.sim.signal_amplitude},
                {"lo_amplitude", c.sim.lo_amplitude}};
    j["distribution"] = {{"kind", c.dist.kind},     {"center", c.dist.center},
                         {"sigma", c.dist.sigma},   {"gamma", c.dist.gamma},
                         {"power_dbm", c.dist.power_dbm}, {"eta", c.dist.eta}};
    j["calibration"] = {{"kappa_ref", c.calib.kappa_ref},
                        {"p_ref_dbm", c.calib.p_ref_dbm},
                        {"exponent", c.calib.exponent},
                        {"lock_phase_rad", c.calib.lock_phase_rad}};
    j["analysis"] = {{"bins", c.analysis.bins},
                     {"threshold_frac", c.analysis.threshold_frac},
                     {"explicit_window", c.analysis.explicit_window},
                     {"window_lo_s", c.analysis.window_lo_s},
                     {"window_hi_s", c.analysis.window_hi_s},
                     {"mask_frac", c.analysis.mask_frac},
                     {"tau_stride", c.analysis.tau_stride},
                     {"min_samples", c.analysis.min_samples},
                     {"resamples", c.analysis.resamples},
                     {"bootstrap", c.analysis.bootstrap},
                     {"grid_points", c.analysis.grid_points},
                     {"method", c.analysis.method},
                     {"hist_bound", c.analysis.hist_bound},
                     {"hist_bound_bins", c.analysis.hist_bound_bins},
                     {"epsilon", c.analysis.epsilon},
                     {"k_max", c.analysis.k_max},
                     {"poisson_weights", c.analysis.poisson_weights},
                     {"max_iterations", c.analysis.max_iterations},
                     {"multistart", c.analysis.multistart}};
    j["sweep"] = {{"powers_dbm", c.sweep.powers_dbm},
                  {"q_target", c.sweep.q_target},
                  {"lidt_watts", c.sweep.lidt_watts}};
    j["scan"] = {{"points", c.scan.points},
                 {"power_dbm", c.scan.power_dbm},
                 {"optimal", c.scan.optimal},
                 {"spd_floor_cps", c.scan.spd.floor_rate_cps},
                 {"spd_peak_cps", c.scan.spd.peak_rate_cps},
                 {"spd_dwell_s", c.scan.spd.dwell_s}};
    j["fock"] = {{"mu", c.fock.mu}, {"n_max", c.fock.n_max}, {"quad_tol", c.fock.quad_tol}};
    return j;
}

/// Overlay a (possibly partial) JSON document onto a config.
/// Unknown keys are rejected rather than silently ignored.
inline void apply_json(RunConfig& c, const ordered_json& j) {
    if (!j.is_object()) throw ParameterError("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") c.seed = detail::as<std::uint64_t>(value, key);
        else if (key == "format") c.format = detail::as<std::string>(value, key);
        else if (key == "sim") {
            for (const auto& [k, v] : value.items()) {
                if (k == "rep_rate_hz") c.sim.rep_rate_hz = detail::as<double>(v, "sim." + k);
                else if (k == "duty_cycle") c.sim.duty_cycle = detail::as<double>(v, "sim." + k);
                else if (k == "sample_rate_hz") c.sim.sample_rate_hz = detail::as<double>(v, "sim." + k);
                else if (k == "n_pulses") c.sim.n_pulses = detail::as<std::uint64_t>(v, "sim." + k);
                else if (k == "envelope") {
                    auto s = detail::as<std::string>(v, "sim." + k);
                    if (s == "raised_cosine") c.sim.envelope = EnvelopeKind::RaisedCosine;
                    else if (s == "gaussian") c.sim.envelope = EnvelopeKind::Gaussian;
                    else throw ParameterError("unknown envelope kind: " + s);
                } else if (k == "rise_time_s") c.sim.rise_time_s = detail::as<double>(v, "sim." + k);
                else if (k == "chirp_rate_rad_per_s")
                    c.sim.chirp_rate_rad_per_s = detail::as<double>(v, "sim." + k);
                else if (k == "noise_rms_v") c.sim.noise_rms_v = detail::as<double>(v, "sim." + k);
                else if (k == "lo_drift_bound_rad")
                    c.sim.lo_drift_bound_rad = detail::as<double>(v, "sim." + k);
                else if (k == "detector_imbalance")
                    c.sim.detector_imbalance = detail::as<double>(v, "sim." + k);
                else if (k == "signal_amplitude")
                    c.sim.signal_amplitude = detail::as<double>(v, "sim." + k);
                else if (k == "lo_amplitude") c.sim.lo_amplitude = detail::as<double>(v, "sim." + k);
                else detail::unknown_key("sim", k);
            }
        } else if (key == "distribution") {
            for (const auto& [k, v] : value.items()) {
                if (k == "kind") c.dist.kind = detail::as<std::string>(v, "distribution." + k);
                else if (k == "center") c.dist.center = detail::as<double>(v, "distribution." + k);
                else if (k == "sigma") c.dist.sigma = detail::as<double>(v, "distribution." + k);
                else if (k == "gamma") c.dist.gamma = detail::as<double>(v, "distribution." + k);
                else if (k == "power_dbm") c.dist.power_dbm = detail::as<double>(v, "distribution." + k);
                else if (k == "eta") c.dist.eta = detail::as<double>(v, "distribution." + k);
                else detail::unknown_key("distribution", k);
            }
        } else if (key == "calibration") {
            for (const auto& [k, v] : value.items()) {
                if (k == "kappa_ref") c.calib.kappa_ref = detail::as<double>(v, "calibration." + k);
                else if (k == "p_ref_dbm") c.calib.p_ref_dbm = detail::as<double>(v, "calibration." + k);
                else if (k == "exponent") c.calib.exponent = detail::as<double>(v, "calibration." + k);
                else if (k == "lock_phase_rad")
                    c.calib.lock_phase_rad = detail::as<double>(v, "calibration." + k);
                else detail::unknown_key("calibration", k);
            }
        } else if (key == "analysis") {
            for (const auto& [k, v] : value.items()) {
                if (k == "bins") c.analysis.bins = detail::as<int>(v, "analysis." + k);
                else if (k == "threshold_frac")
                    c.analysis.threshold_frac = detail::as<double>(v, "analysis." + k);
                else if (k == "explicit_window")
                    c.analysis.explicit_window = detail::as<bool>(v, "analysis." + k);
                else if (k == "window_lo_s") c.analysis.window_lo_s = detail::as<double>(v, "analysis." + k);
                else if (k == "window_hi_s") c.analysis.window_hi_s = detail::as<double>(v, "analysis." + k);
                else if (k == "mask_frac") c.analysis.mask_frac = detail::as<double>(v, "analysis." + k);
                else if (k == "tau_stride")
                    c.analysis.tau_stride = detail::as<std::uint64_t>(v, "analysis." + k);
                else if (k == "min_samples")
                    c.analysis.min_samples = detail::as<std::uint64_t>(v, "analysis." + k);
                else if (k == "resamples") c.analysis.resamples = detail::as<int>(v, "analysis." + k);
                else if (k == "bootstrap") c.analysis.bootstrap = detail::as<std::string>(v, "analysis." + k);
                else if (k == "grid_points") c.analysis.grid_points = detail::as<int>(v, "analysis." + k);
                else if (k == "method") c.analysis.method = detail::as<std::string>(v, "analysis." + k);
                else if (k == "hist_bound") c.analysis.hist_bound = detail::as<bool>(v, "analysis." + k);
                else if (k == "hist_bound_bins")
                    c.analysis.hist_bound_bins = detail::as<int>(v, "analysis." + k);
                else if (k == "epsilon") c.analysis.epsilon = detail::as<double>(v, "analysis." + k);
                else if (k == "k_max") c.analysis.k_max = detail::as<int>(v, "analysis." + k);
                else if (k == "poisson_weights")
                    c.analysis.poisson_weights = detail::as<bool>(v, "analysis." + k);
                else if (k == "max_iterations")
                    c.analysis.max_iterations = detail::as<int>(v, "analysis." + k);
                else if (k == "multistart") c.analysis.multistart = detail::as<bool>(v, "analysis." + k);
                else detail::unknown_key("analysis", k);
            }
        } else if (key == "sweep") {
            for (const auto& [k, v] : value.items()) {
                if (k == "powers_dbm")
                    c.sweep.powers_dbm = detail::as<std::vector<double>>(v, "sweep." + k);
                else if (k == "q_target") c.sweep.q_target = detail::as<double>(v, "sweep." + k);
                else if (k == "lidt_watts") c.sweep.lidt_watts = detail::as<double>(v, "sweep." + k);
                else detail::unknown_key("sweep", k);
            }
        } else if (key == "scan") {
            for (const auto& [k, v] : value.items()) {
                if (k == "points") c.scan.points = detail::as<std::uint64_t>(v, "scan." + k);
                else if (k == "power_dbm") c.scan.power_dbm = detail::as<double>(v, "scan." + k);
                else if (k == "optimal")
                    c.scan.optimal = detail::as<std::array<double, 3>>(v, "scan." + k);
                else if (k == "spd_floor_cps")
                    c.scan.spd.floor_rate_cps = detail::as<double>(v, "scan." + k);
                else if (k == "spd_peak_cps")
                    c.scan.spd.peak_rate_cps = detail::as<double>(v, "scan." + k);
                else if (k == "spd_dwell_s") c.scan.spd.dwell_s = detail::as<double>(v, "scan." + k);
                else detail::unknown_key("scan", k);
            }
        } else if (key == "fock") {
            for (const auto& [k, v] : value.items()) {
                if (k == "mu") c.fock.mu = detail::as<double>(v, "fock." + k);
                else if (k == "n_max") c.fock.n_max = detail::as<int>(v, "fock." + k);
                else if (k == "quad_tol") c.fock.quad_tol = detail::as<double>(v, "fock." + k);
                else detail::unknown_key("fock", k);
            }
        } else {
            detail::unknown_key("(root)", key);
        }
    }
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }
    apply_json(c, j);
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash of the canonical (resolved, ordered) config serialization.
inline std::string config_hash(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
    return buf;
}

}  // namespace qrlock
