#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrlock/errors.hpp"
#include "qrlock/fock.hpp"
#include "qrlock/heterodyne.hpp"
#include "qrlock/phase_extraction.hpp"
#include "qrlock/polarization_scan.hpp"
#include "qrlock/power_sweep.hpp"
#include "qrlock/qrel.hpp"
#include "qrlock/results.hpp"
#include "qrlock/run_config.hpp"
#include "qrlock/segmentation.hpp"
#include "qrlock/version.hpp"
#include "qrlock/waveform_io.hpp"

namespace qrlock::cli {

namespace detail {

inline std::string sidecar_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".config.json");
    return p.string();
}

inline std::string csv_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".csv");
    return p.string();
}

inline std::optional<std::string> maybe_timestamp(bool enabled) {
    if (!enabled) return std::nullopt;
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

inline void write_sidecar(const std::string& out, const RunConfig& cfg) {
    write_json_file(sidecar_path(out), to_json(cfg));
}

inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Bundles the flags shared by every data-producing subcommand.
struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;
    bool timestamp = false;

    CLI::Option* seed_opt = nullptr;

    void attach(CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        seed_opt = cmd->add_option("--seed", seed, "master RNG seed");
        if (with_out) cmd->add_option("--out", out, "output path")->required();
        cmd->add_option("--threads", threads, "worker threads (does not affect results)")
            ->check(CLI::Range(1, 256));
        cmd->add_flag("--timestamp", timestamp,
                      "include a wall-clock timestamp in results (off by default so "
                      "reruns are byte-identical)");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (seed_opt && *seed_opt) cfg.seed = seed;
        return cfg;
    }
};

struct SimFlags {
    double rep_rate = 0, duty = 0, sample_rate = 0, rise = 0, chirp = 0, noise = 0, drift = 0,
           imbalance = 0;
    std::uint64_t pulses = 0;
    std::string envelope;
    CLI::Option *o_rep = nullptr, *o_duty = nullptr, *o_sr = nullptr, *o_rise = nullptr,
                *o_chirp = nullptr, *o_noise = nullptr, *o_drift = nullptr, *o_imb = nullptr,
                *o_pulses = nullptr, *o_env = nullptr;

    void attach(CLI::App* cmd) {
        o_rep = cmd->add_option("--rep-rate", rep_rate, "pulse repetition rate [Hz]");
        o_duty = cmd->add_option("--duty", duty, "duty cycle (0, 1)");
        o_sr = cmd->add_option("--sample-rate", sample_rate, "oscilloscope rate [samples/s]");
        o_pulses = cmd->add_option("--pulses", pulses, "number of pulses");
        o_rise = cmd->add_option("--rise-time", rise, "envelope edge time [s]");
        o_chirp = cmd->add_option("--chirp", chirp, "intra-pulse chirp [rad/s]");
        o_noise = cmd->add_option("--noise-rms", noise, "additive noise RMS [V]");
        o_drift = cmd->add_option("--lo-drift", drift, "LO phase drift bound [rad]");
        o_imb = cmd->add_option("--imbalance", imbalance, "balanced detector gain mismatch");
        o_env = cmd->add_option("--envelope", envelope, "raised_cosine | gaussian");
    }

    void apply(RunConfig& cfg) const {
        if (*o_rep) cfg.sim.rep_rate_hz = rep_rate;
        if (*o_duty) cfg.sim.duty_cycle = duty;
        if (*o_sr) cfg.sim.sample_rate_hz = sample_rate;
        if (*o_pulses) cfg.sim.n_pulses = pulses;
        if (*o_rise) cfg.sim.rise_time_s = rise;
        if (*o_chirp) cfg.sim.chirp_rate_rad_per_s = chirp;
        if (*o_noise) cfg.sim.noise_rms_v = noise;
        if (*o_drift) cfg.sim.lo_drift_bound_rad = drift;
        if (*o_imb) cfg.sim.detector_imbalance = imbalance;
        if (*o_env) {
            if (envelope == "raised_cosine") cfg.sim.envelope = EnvelopeKind::RaisedCosine;
            else if (envelope == "gaussian") cfg.sim.envelope = EnvelopeKind::Gaussian;
            else throw ParameterError("unknown envelope kind: " + envelope);
        }
    }
};

struct DistFlags {
    std::string kind;
    double center = 0, sigma = 0, gamma = 0, power = 0, eta = 0;
    CLI::Option *o_kind = nullptr, *o_center = nullptr, *o_sigma = nullptr, *o_gamma = nullptr,
                *o_power = nullptr, *o_eta = nullptr;

    void attach(CLI::App* cmd) {
        o_kind = cmd->add_option(
            "--dist", kind, "uniform | delta | wrapped_gaussian | wrapped_cauchy | wrapped_voigt | locked");
        o_center = cmd->add_option("--center", center, "distribution center [rad]");
        o_sigma = cmd->add_option("--sigma", sigma, "Gaussian width [rad]");
        o_gamma = cmd->add_option("--gamma", gamma, "Lorentzian HWHM [rad]");
        o_power = cmd->add_option("--power-dbm", power, "injected power for --dist locked [dBm]");
        o_eta = cmd->add_option("--eta", eta, "polarization coupling for --dist locked");
    }

    void apply(RunConfig& cfg) const {
        if (*o_kind) cfg.dist.kind = kind;
        if (*o_center) cfg.dist.center = center;
        if (*o_sigma) cfg.dist.sigma = sigma;
        if (*o_gamma) cfg.dist.gamma = gamma;
        if (*o_power) cfg.dist.power_dbm = power;
        if (*o_eta) cfg.dist.eta = eta;
    }
};

struct AnalysisFlags {
    int bins = 0, resamples = 0, grid = 0, hist_bins = 0, k_max = 0, max_iter = 0;
    double threshold = 0, mask = 0, eps = 0, win_lo = 0, win_hi = 0;
    std::uint64_t stride = 0, min_samples = 0;
    std::string bootstrap, method;
    bool hist_bound = false;
    CLI::Option *o_bins = nullptr, *o_thr = nullptr, *o_mask = nullptr, *o_stride = nullptr,
                *o_min = nullptr, *o_res = nullptr, *o_boot = nullptr, *o_grid = nullptr,
                *o_method = nullptr, *o_hist = nullptr, *o_hbins = nullptr, *o_eps = nullptr,
                *o_wlo = nullptr, *o_whi = nullptr, *o_kmax = nullptr, *o_iter = nullptr;

    void attach(CLI::App* cmd) {
        o_bins = cmd->add_option("--bins", bins, "phase histogram bins");
        o_thr = cmd->add_option("--threshold-frac", threshold, "window threshold fraction");
        o_wlo = cmd->add_option("--window-lo", win_lo, "explicit window start [s]");
        o_whi = cmd->add_option("--window-hi", win_hi, "explicit window end [s]");
        o_mask = cmd->add_option("--mask-frac", mask, "per-sample magnitude mask fraction");
        o_stride = cmd->add_option("--stride", stride, "sampling-time stride");
        o_min = cmd->add_option("--min-samples", min_samples, "min phases per fit");
        o_res = cmd->add_option("--resamples", resamples, "bootstrap resamples");
        o_boot = cmd->add_option("--bootstrap", bootstrap, "none | argmin | all");
        o_grid = cmd->add_option("--grid", grid, "density minimum search grid");
        o_method = cmd->add_option("--method", method, "persample | integrated | both");
        o_hist = cmd->add_flag("--hist-bound", hist_bound, "also compute the histogram lower bound");
        o_hbins = cmd->add_option("--hist-bound-bins", hist_bins, "bins for the histogram bound");
        o_eps = cmd->add_option("--epsilon", eps, "histogram bound failure probability");
        o_kmax = cmd->add_option("--k-max", k_max, "min wrap images per side in the fit model");
        o_iter = cmd->add_option("--max-iterations", max_iter, "fit iteration cap");
    }

    void apply(RunConfig& cfg) const {
        if (*o_bins) cfg.analysis.bins = bins;
        if (*o_thr) cfg.analysis.threshold_frac = threshold;
        if (*o_wlo || *o_whi) {
            cfg.analysis.explicit_window = true;
            if (*o_wlo) cfg.analysis.window_lo_s = win_lo;
            if (*o_whi) cfg.analysis.window_hi_s = win_hi;
        }
        if (*o_mask) cfg.analysis.mask_frac = mask;
        if (*o_stride) cfg.analysis.tau_stride = stride;
        if (*o_min) cfg.analysis.min_samples = min_samples;
        if (*o_res) cfg.analysis.resamples = resamples;
        if (*o_boot) cfg.analysis.bootstrap = bootstrap;
        if (*o_grid) cfg.analysis.grid_points = grid;
        if (*o_method) cfg.analysis.method = method;
        if (*o_hist) cfg.analysis.hist_bound = true;
        if (*o_hbins) cfg.analysis.hist_bound_bins = hist_bins;
        if (*o_eps) cfg.analysis.epsilon = eps;
        if (*o_kmax) cfg.analysis.k_max = k_max;
        if (*o_iter) cfg.analysis.max_iterations = max_iter;
    }
};

inline void run_simulate(const RunConfig& cfg, const std::string& out, int threads) {
    SimConfig sim = cfg.seeded_sim();
    sim.validate();
    auto dist = cfg.dist.resolve(cfg.calib);
    auto train = generate_pulse_train(sim, dist);
    auto lo = generate_lo_model(sim);
    auto wf = synthesize_heterodyne(train, lo, sim, threads);

    if (cfg.format == "text") write_waveform_text(out, wf, config_hash(cfg));
    else if (cfg.format == "binary") write_waveform_binary(out, wf);
    else throw ParameterError("unknown waveform format: " + cfg.format);
    write_sidecar(out, cfg);
}

inline void run_analyze(const RunConfig& cfg, const std::string& in, const std::string& out,
                        int threads, bool timestamp) {
    auto file = read_waveform(in);
    auto seg = segment_pulses(file.waveform, cfg.sim.rep_rate_hz);
    auto win = select_window(seg, cfg.analysis.window_spec());

    const bool per_sample = cfg.analysis.method == "persample" || cfg.analysis.method == "both";
    const bool integrated = cfg.analysis.method == "integrated" || cfg.analysis.method == "both";
    if (!per_sample && !integrated)
        throw ParameterError("unknown analysis method: " + cfg.analysis.method);

    ordered_json j = results_container("analyze", cfg, maybe_timestamp(timestamp));
    j["input"] = in;
    j["input_config_hash"] = file.config_hash.empty() ? ordered_json(nullptr)
                                                      : ordered_json(file.config_hash);
    j["window"] = {{"lo_sample", win.lo},
                   {"hi_sample", win.hi},
                   {"lo_s", win.lo * seg.sample_period_s()},
                   {"hi_s", win.hi * seg.sample_period_s()},
                   {"peak_mean_magnitude_v", win.peak}};

    std::vector<double> bound_phases;
    if (per_sample) {
        auto matrix = phase_matrix(seg, win, cfg.analysis.mask_frac);
        auto curve = qrel_timeseries(matrix, cfg.analysis.qrel_options(cfg.seed, threads));
        j["per_sample"] = to_json(curve);
        bound_phases = matrix.column_phases(curve.points[curve.argmin].column);
    }
    if (integrated) {
        auto phases = integrate_pulse(seg, win).phases;
        auto hist = PhaseHistogram::from_phases(phases, cfg.analysis.bins);
        auto fit = fit_wrapped_voigt(hist, std::nullopt, cfg.analysis.fit_options());
        ordered_json ji;
        ji["q_rel"] = qrel_from_pdf(fit.params, cfg.analysis.grid_points);
        ji["fit"] = to_json(FitSummary{fit.params.mu_v, fit.params.sigma, fit.params.gamma,
                                       fit.s_squared, fit.converged});
        if (cfg.analysis.bootstrap != "none") {
            auto opts = cfg.analysis.qrel_options(cfg.seed, threads);
            // Integrated bootstrap gets its own substream block.
            ji["bootstrap"] = to_json(bootstrap_qrel(phases, opts, 0x2000000ULL));
        }
        j["integrated"] = std::move(ji);
        if (bound_phases.empty()) bound_phases = phases;
    }
    if (cfg.analysis.hist_bound) {
        j["histogram_bound"] = to_json(histogram_lower_bound(
            bound_phases, cfg.analysis.hist_bound_bins, cfg.analysis.epsilon));
    }

    write_json_file(out, j);
    write_sidecar(out, cfg);
}

inline void run_sweep(const RunConfig& cfg, const std::string& out, int threads, bool timestamp) {
    SweepOptions opts;
    opts.powers_dbm = cfg.sweep.powers_dbm;
    opts.calib = cfg.calib;
    opts.sim = cfg.seeded_sim();
    opts.window = cfg.analysis.window_spec();
    opts.mask_frac = cfg.analysis.mask_frac;
    opts.analysis = cfg.analysis.qrel_options(cfg.seed, 1);
    opts.threads = threads;

    auto sweep = power_sweep(opts, cfg.seed);

    ordered_json j = results_container("sweep", cfg, maybe_timestamp(timestamp));
    j["sweep"] = to_json(sweep);
    try {
        auto iso = isolation_threshold(sweep, cfg.sweep.q_target, cfg.sweep.lidt_watts);
        j["isolation"] = {{"q_target", cfg.sweep.q_target},
                          {"lidt_watts", cfg.sweep.lidt_watts},
                          {"lidt_dbm", watts_to_dbm(cfg.sweep.lidt_watts)},
                          {"threshold_dbm", iso.threshold_dbm},
                          {"isolation_db", iso.isolation_db}};
    } catch (const AnalysisError& e) {
        j["isolation"] = {{"q_target", cfg.sweep.q_target},
                          {"lidt_watts", cfg.sweep.lidt_watts},
                          {"threshold_dbm", nullptr},
                          {"note", e.what()}};
    }
    write_json_file(out, j);

    std::ofstream csv(csv_path(out), std::ios::binary);
    if (!csv) throw ParameterError("cannot open for writing: " + csv_path(out));
    csv << "power_dbm,ok,q_rel_min,q_err,q_integrated,q_integrated_err\n";
    for (const auto& p : sweep.points) {
        csv << fmt_g17(p.power_dbm) << "," << (p.ok ? 1 : 0) << ",";
        if (p.ok) {
            csv << fmt_g17(p.q_rel_min) << "," << fmt_g17(p.q_err) << ","
                << fmt_g17(p.q_integrated) << "," << fmt_g17(p.q_integrated_err);
        } else {
            csv << ",,,";
        }
        csv << "\n";
    }
    write_sidecar(out, cfg);
}

inline void run_scan(const RunConfig& cfg, const std::string& out, int threads, bool timestamp) {
    PolScanConfig scan;
    scan.grid_points = cfg.scan.points;
    scan.power_dbm = cfg.scan.power_dbm;
    scan.optimal = StokesState::normalized(cfg.scan.optimal[0], cfg.scan.optimal[1],
                                           cfg.scan.optimal[2]);
    scan.calib = cfg.calib;
    scan.sim = cfg.seeded_sim();
    scan.window = cfg.analysis.window_spec();
    scan.bins = cfg.analysis.bins;
    scan.fit = cfg.analysis.fit_options();
    scan.qrel_grid = cfg.analysis.grid_points;
    scan.spd = cfg.scan.spd;
    scan.threads = threads;

    auto result = scan_sphere(scan, cfg.seed);

    ordered_json j = results_container("scan-pol", cfg, maybe_timestamp(timestamp));
    j["scan"] = to_json(result);
    write_json_file(out, j);

    std::ofstream csv(csv_path(out), std::ios::binary);
    if (!csv) throw ParameterError("cannot open for writing: " + csv_path(out));
    csv << "index,s1,s2,s3,eta,spd_counts,ok,q_rel\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& p = result.points[i];
        csv << i << "," << fmt_g17(p.state.s1) << "," << fmt_g17(p.state.s2) << ","
            << fmt_g17(p.state.s3) << "," << fmt_g17(p.eta) << "," << p.spd_counts << ","
            << (p.ok ? 1 : 0) << "," << (p.ok ? fmt_g17(p.q_rel) : "") << "\n";
    }
    write_sidecar(out, cfg);
}

inline void run_fock(const RunConfig& cfg, const std::string& from_results,
                     const std::string& out, bool timestamp) {
    DensityMatrix rho;
    ordered_json j = results_container("fock", cfg, maybe_timestamp(timestamp));
    if (!from_results.empty()) {
        auto res = read_json_file(from_results);
        WrappedVoigtParams p;
        p.k_max = cfg.analysis.k_max;
        const char* where = nullptr;
        if (res.contains("integrated") && res["integrated"].contains("fit")) where = "integrated";
        else if (res.contains("per_sample")) where = "per_sample";
        if (!where) throw ParameterError("results file has no fit to take parameters from");
        ordered_json fit;
        if (std::string(where) == "integrated") fit = res["integrated"]["fit"];
        else {
            const auto& points = res["per_sample"]["points"];
            if (points.empty()) throw ParameterError("results file has no fitted points");
            // Use the fit at the q minimum.
            std::size_t best = 0;
            for (std::size_t i = 1; i < points.size(); ++i)
                if (points[i]["q_rel"].get<double>() < points[best]["q_rel"].get<double>()) best = i;
            fit = points[best]["fit"];
        }
        p.mu_v = fit["mu_v"].get<double>();
        p.sigma = fit["sigma"].get<double>();
        p.gamma = fit["gamma"].get<double>();
        rho = density_matrix(cfg.fock.mu, p, cfg.fock.n_max, cfg.fock.quad_tol);
        j["source"] = {{"from_results", from_results},
                       {"fit", to_json(FitSummary{p.mu_v, p.sigma, p.gamma, 0.0, true})}};
    } else {
        auto dist = cfg.dist.resolve(cfg.calib);
        rho = density_matrix(cfg.fock.mu, dist, cfg.fock.n_max, cfg.fock.quad_tol);
        j["source"] = {{"distribution", std::string(to_string(dist.kind))}};
    }
    j["density_matrix"] = to_json(rho);
    j["max_offdiag"] = max_offdiag(rho);
    write_json_file(out, j);
    write_sidecar(out, cfg);
}

inline void run_report(const std::string& in, std::ostream& os) {
    auto j = read_json_file(in);
    auto get_or = [&](const char* key, const std::string& fallback) {
        return j.contains(key) ? j[key].dump() : fallback;
    };
    os << "tool:    " << get_or("tool", "?") << " " << get_or("version", "?") << "\n";
    os << "command: " << get_or("command", "?") << "\n";
    os << "seed:    " << get_or("seed", "?") << "\n";
    os << "config:  " << get_or("config_hash", "?") << "\n";

    if (j.contains("per_sample")) {
        const auto& ps = j["per_sample"];
        os << "q_rel_min (per-sample): " << ps["q_rel_min"].dump() << " at tau "
           << ps["tau_at_min_s"].dump() << " s";
        if (!ps["bootstrap_at_min"].is_null())
            os << "  (bootstrap std " << ps["bootstrap_at_min"]["stddev"].dump() << ")";
        os << "\n";
        os << "fitted columns: " << ps["points"].size() << ", failed: " << ps["failures"].size()
           << "\n";
    }
    if (j.contains("integrated")) {
        os << "q_rel (integrated): " << j["integrated"]["q_rel"].dump() << "\n";
    }
    if (j.contains("histogram_bound")) {
        os << "histogram bound: " << j["histogram_bound"]["q_rel_bound"].dump() << " ("
           << j["histogram_bound"]["empty_bins"].dump() << " empty bins)\n";
    }
    if (j.contains("sweep")) {
        os << "sweep points:\n";
        for (const auto& p : j["sweep"]["points"]) {
            os << "  " << p["power_dbm"].dump() << " dBm: ";
            if (p["ok"].get<bool>())
                os << "q_rel_min " << p["q_rel_min"].dump() << " +- " << p["q_err"].dump() << "\n";
            else
                os << "failed (" << p["failure"].get<std::string>() << ")\n";
        }
        if (j.contains("isolation")) {
            const auto& iso = j["isolation"];
            if (iso.contains("threshold_dbm") && !iso["threshold_dbm"].is_null())
                os << "threshold: " << iso["threshold_dbm"].dump() << " dBm, required isolation "
                   << iso["isolation_db"].dump() << " dB\n";
            else
                os << "threshold: not crossed in range\n";
        }
    }
    if (j.contains("scan")) {
        const auto& sc = j["scan"];
        os << "scan argmin(q) point " << sc["argmin_q"].dump() << ", argmin(counts) point "
           << sc["argmin_counts"].dump() << ", cell angle " << sc["cell_angle_rad"].dump()
           << " rad\n";
    }
    if (j.contains("density_matrix")) {
        os << "density matrix: n_max " << j["density_matrix"]["n_max"].dump() << ", trace "
           << j["density_matrix"]["trace"].dump() << ", max offdiag " << j["max_offdiag"].dump()
           << "\n";
    }
}

}  // namespace detail

/// Entry point. Exit codes: 0 success, 2 parameter/config error, 3 input
/// parse error, 4 analysis failure, 1 unexpected.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"heterodyne phase-randomness evaluation of gain-switched laser sources"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "synthesize a heterodyne waveform");
    detail::CommonFlags sim_common;
    sim_common.attach(sim_cmd);
    detail::SimFlags sim_flags;
    sim_flags.attach(sim_cmd);
    detail::DistFlags sim_dist;
    sim_dist.attach(sim_cmd);
    std::string sim_format;
    auto* o_format = sim_cmd->add_option("--format", sim_format, "text | binary");
    sim_cmd->callback([&] {
        RunConfig cfg = sim_common.resolve();
        sim_flags.apply(cfg);
        sim_dist.apply(cfg);
        if (*o_format) cfg.format = sim_format;
        detail::run_simulate(cfg, sim_common.out, sim_common.threads);
    });

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "estimate q from a waveform");
    detail::CommonFlags an_common;
    an_common.attach(an_cmd);
    detail::SimFlags an_sim;
    an_sim.attach(an_cmd);
    detail::AnalysisFlags an_flags;
    an_flags.attach(an_cmd);
    std::string an_in;
    an_cmd->add_option("--in", an_in, "waveform file (text or binary)")->required();
    an_cmd->callback([&] {
        RunConfig cfg = an_common.resolve();
        an_sim.apply(cfg);
        an_flags.apply(cfg);
        detail::run_analyze(cfg, an_in, an_common.out, an_common.threads, an_common.timestamp);
    });

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "q versus injected power, isolation threshold");
    detail::CommonFlags sw_common;
    sw_common.attach(sw_cmd);
    detail::SimFlags sw_sim;
    sw_sim.attach(sw_cmd);
    detail::AnalysisFlags sw_flags;
    sw_flags.attach(sw_cmd);
    std::vector<double> sw_powers;
    double sw_target = 0, sw_lidt = 0;
    auto* o_powers = sw_cmd->add_option("--powers", sw_powers, "power points [dBm]")->delimiter(',');
    auto* o_target = sw_cmd->add_option("--q-target", sw_target, "q threshold defining the crossing");
    auto* o_lidt = sw_cmd->add_option("--lidt-watts", sw_lidt, "fiber damage threshold [W]");
    sw_cmd->callback([&] {
        RunConfig cfg = sw_common.resolve();
        sw_sim.apply(cfg);
        sw_flags.apply(cfg);
        if (*o_powers) cfg.sweep.powers_dbm = sw_powers;
        if (*o_target) cfg.sweep.q_target = sw_target;
        if (*o_lidt) cfg.sweep.lidt_watts = sw_lidt;
        detail::run_sweep(cfg, sw_common.out, sw_common.threads, sw_common.timestamp);
    });

    // scan-pol
    auto* sc_cmd = app.add_subcommand("scan-pol", "q and SPD counts over the Poincare sphere");
    detail::CommonFlags sc_common;
    sc_common.attach(sc_cmd);
    detail::SimFlags sc_sim;
    sc_sim.attach(sc_cmd);
    std::uint64_t sc_points = 0;
    double sc_power = 0;
    std::vector<double> sc_optimal;
    double sc_floor = 0, sc_peak = 0, sc_dwell = 0;
    auto* o_points = sc_cmd->add_option("--points", sc_points, "lattice points on the sphere");
    auto* o_power = sc_cmd->add_option("--power-dbm", sc_power, "injected power [dBm]");
    auto* o_optimal =
        sc_cmd->add_option("--optimal", sc_optimal, "optimal Stokes vector s1,s2,s3")->delimiter(',');
    auto* o_floor = sc_cmd->add_option("--spd-floor", sc_floor, "SPD rate at perfect coupling [cps]");
    auto* o_peak = sc_cmd->add_option("--spd-peak", sc_peak, "extra SPD rate at full mismatch [cps]");
    auto* o_dwell = sc_cmd->add_option("--spd-dwell", sc_dwell, "SPD dwell per point [s]");
    sc_cmd->callback([&] {
        RunConfig cfg = sc_common.resolve();
        sc_sim.apply(cfg);
        if (*o_points) cfg.scan.points = sc_points;
        if (*o_power) cfg.scan.power_dbm = sc_power;
        if (*o_optimal) {
            if (sc_optimal.size() != 3)
                throw ParameterError("--optimal needs exactly 3 components");
            cfg.scan.optimal = {sc_optimal[0], sc_optimal[1], sc_optimal[2]};
        }
        if (*o_floor) cfg.scan.spd.floor_rate_cps = sc_floor;
        if (*o_peak) cfg.scan.spd.peak_rate_cps = sc_peak;
        if (*o_dwell) cfg.scan.spd.dwell_s = sc_dwell;
        detail::run_scan(cfg, sc_common.out, sc_common.threads, sc_common.timestamp);
    });

    // fock
    auto* fk_cmd = app.add_subcommand("fock", "photon-number density matrix of the source");
    detail::CommonFlags fk_common;
    fk_common.attach(fk_cmd);
    detail::DistFlags fk_dist;
    fk_dist.attach(fk_cmd);
    double fk_mu = 0, fk_tol = 0;
    int fk_nmax = 0;
    std::string fk_from;
    auto* o_mu = fk_cmd->add_option("--mu", fk_mu, "mean photon number");
    auto* o_nmax = fk_cmd->add_option("--n-max", fk_nmax, "Fock truncation");
    auto* o_tol = fk_cmd->add_option("--quad-tol", fk_tol, "moment quadrature tolerance");
    fk_cmd->add_option("--from-results", fk_from, "take the phase density from an analyze result");
    fk_cmd->callback([&] {
        RunConfig cfg = fk_common.resolve();
        fk_dist.apply(cfg);
        if (*o_mu) cfg.fock.mu = fk_mu;
        if (*o_nmax) cfg.fock.n_max = fk_nmax;
        if (*o_tol) cfg.fock.quad_tol = fk_tol;
        detail::run_fock(cfg, fk_from, fk_common.out, fk_common.timestamp);
    });

    // report
    auto* rp_cmd = app.add_subcommand("report", "summarize a results file");
    std::string rp_in;
    rp_cmd->add_option("--in", rp_in, "results JSON")->required();
    rp_cmd->callback([&] { detail::run_report(rp_in, std::cout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace qrlock::cli
