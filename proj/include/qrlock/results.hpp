#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "qrlock/fock.hpp"
#include "qrlock/polarization_scan.hpp"
#include "qrlock/power_sweep.hpp"
#include "qrlock/qrel.hpp"
#include "qrlock/run_config.hpp"
#include "qrlock/version.hpp"

namespace qrlock {

// JSON has no NaN; absent-by-NaN doubles serialize as null.
inline ordered_json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

inline ordered_json to_json(const BootstrapResult& b) {
    return {{"mean", b.mean},         {"stddev", b.stddev},
            {"p2_5", b.p2_5},         {"p97_5", b.p97_5},
            {"resamples", b.n_resamples}, {"failures", b.n_failures}};
}

inline ordered_json to_json(const FitSummary& f) {
    return {{"mu_v", f.mu_v},
            {"sigma", f.sigma},
            {"gamma", f.gamma},
            {"s_squared", f.s_squared},
            {"converged", f.converged}};
}

inline ordered_json to_json(const QRelCurve& c) {
    ordered_json points = ordered_json::array();
    for (const auto& p : c.points)
        points.push_back({{"tau_s", p.tau_s},
                          {"column", p.column},
                          {"n_phases", p.n_phases},
                          {"q_rel", p.q_rel},
                          {"q_err", json_number(p.q_err)},
                          {"fit", to_json(p.fit)}});
    ordered_json failures = ordered_json::array();
    for (const auto& f : c.failures)
        failures.push_back({{"column", f.column}, {"tau_s", f.tau_s}, {"reason", f.reason}});
    ordered_json j;
    j["q_rel_min"] = c.q_rel_min;
    j["tau_at_min_s"] = c.tau_at_min_s;
    j["bootstrap_at_min"] =
        c.min_bootstrap.n_resamples > 0 ? to_json(c.min_bootstrap) : ordered_json(nullptr);
    j["points"] = std::move(points);
    j["failures"] = std::move(failures);
    return j;
}

inline ordered_json to_json(const SweepResult& s) {
    ordered_json points = ordered_json::array();
    for (const auto& p : s.points) {
        ordered_json jp;
        jp["power_dbm"] = p.power_dbm;
        jp["ok"] = p.ok;
        if (p.ok) {
            jp["q_rel_min"] = p.q_rel_min;
            jp["q_err"] = json_number(p.q_err);
            jp["q_integrated"] = p.q_integrated;
            jp["q_integrated_err"] = json_number(p.q_integrated_err);
            jp["sigma_at_min"] = p.sigma_at_min;
            jp["gamma_at_min"] = p.gamma_at_min;
        } else {
            jp["failure"] = p.failure;
        }
        points.push_back(std::move(jp));
    }
    return {{"points", std::move(points)}};
}

inline ordered_json to_json(const PolScanResult& r) {
    ordered_json points = ordered_json::array();
    for (const auto& p : r.points) {
        ordered_json jp;
        jp["s1"] = p.state.s1;
        jp["s2"] = p.state.s2;
        jp["s3"] = p.state.s3;
        jp["eta"] = p.eta;
        jp["spd_counts"] = p.spd_counts;
        jp["ok"] = p.ok;
        if (p.ok) jp["q_rel"] = p.q_rel;
        else jp["failure"] = p.failure;
        points.push_back(std::move(jp));
    }
    ordered_json j;
    j["argmin_q"] = r.argmin_q;
    j["argmin_counts"] = r.argmin_counts;
    j["cell_angle_rad"] = r.cell_angle;
    j["points"] = std::move(points);
    return j;
}

inline ordered_json to_json(const DensityMatrix& rho) {
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (int n = 0; n <= rho.n_max; ++n) {
        ordered_json row_re = ordered_json::array(), row_im = ordered_json::array();
        for (int m = 0; m <= rho.n_max; ++m) {
            row_re.push_back(rho.at(n, m).real());
            row_im.push_back(rho.at(n, m).imag());
        }
        re.push_back(std::move(row_re));
        im.push_back(std::move(row_im));
    }
    ordered_json j;
    j["n_max"] = rho.n_max;
    j["mean_photons"] = rho.mean_photons;
    j["trace"] = rho.trace();
    j["trace_deficit"] = rho.trace_deficit;
    j["real"] = std::move(re);
    j["imag"] = std::move(im);
    return j;
}

inline ordered_json to_json(const HistogramBound& b) {
    return {{"q_rel_bound", b.q_rel}, {"empty_bins", b.empty_bins}};
}

/// Envelope shared by every results file: tool identity, schema version,
/// seed, resolved config and its hash. Timestamps are opt-in so identical
/// runs yield identical bytes.
inline ordered_json results_container(const std::string& command, const RunConfig& cfg,
                                      const std::optional<std::string>& timestamp = std::nullopt) {
    ordered_json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(kToolVersion);
    j["schema"] = kResultsSchemaVersion;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    if (timestamp) j["timestamp"] = *timestamp;
    j["config"] = to_json(cfg);
    return j;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw ParameterError("write failed: " + path);
}

inline ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open: " + path);
    try {
        ordered_json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
    }
}

}  // namespace qrlock
