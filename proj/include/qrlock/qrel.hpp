#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"
#include "qrlock/parallel.hpp"
#include "qrlock/phase_extraction.hpp"
#include "qrlock/rng.hpp"
#include "qrlock/voigt_fit.hpp"
#include "qrlock/wrapped_voigt.hpp"

namespace qrlock {

/// Randomness parameter of a fitted phase density: 2*pi times the density
/// minimum over a uniform grid, clamped to (0, 1]. Equals 1 for the uniform
/// density and approaches 0 as the distribution concentrates.
inline double qrel_from_pdf(const WrappedVoigtParams& p, int grid_points = 4096) {
    if (grid_points < 64) throw ParameterError("qrel grid needs at least 64 points");
    double lowest = std::numeric_limits<double>::infinity();
    const double step = kTwoPi / grid_points;
    for (int i = 0; i < grid_points; ++i) {
        double f = wrapped_voigt_pdf(-kPi + (i + 0.5) * step, p);
        if (f < lowest) lowest = f;
    }
    double q = kTwoPi * lowest;
    if (q > 1.0) return 1.0;
    // The density is strictly positive; a nonpositive evaluation is tail
    // cancellation far below working precision.
    return q > 0.0 ? q : std::numeric_limits<double>::min();
}

struct BootstrapResult {
    double mean = 0.0;
    double stddev = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
    int n_resamples = 0;
    int n_failures = 0;
};

struct QRelOptions {
    FitOptions fit;
    int bins = 64;
    int grid_points = 4096;
    std::size_t tau_stride = 1;
    std::size_t min_samples = 100;
    int n_resamples = 50;
    enum class Bootstrap { None, ArgminOnly, All } bootstrap = Bootstrap::ArgminOnly;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Resample-with-replacement error bar for the q estimate of one phase set.
/// Each resample rebuilds the histogram and refits from scratch. More than
/// 20% failed refits marks the estimate unstable.
inline BootstrapResult bootstrap_qrel(std::span<const double> phases, const QRelOptions& opts,
                                      std::uint64_t substream_index) {
    if (opts.n_resamples < 2) throw ParameterError("bootstrap needs at least 2 resamples");
    const std::size_t n = phases.size();
    if (n == 0) throw ParameterError("bootstrap needs a non-empty phase set");

    std::vector<double> q_values;
    q_values.reserve(static_cast<std::size_t>(opts.n_resamples));
    int failures = 0;
    std::vector<double> resampled(n);
    for (int rep = 0; rep < opts.n_resamples; ++rep) {
        Rng rng = Rng::stream(opts.seed, streams::kBootstrap,
                              substream_index * 1000003ULL + static_cast<std::uint64_t>(rep));
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            resampled[i] = phases[idx];
        }
        try {
            auto hist = PhaseHistogram::from_phases(resampled, opts.bins);
            auto fit = fit_wrapped_voigt(hist, std::nullopt, opts.fit);
            q_values.push_back(qrel_from_pdf(fit.params, opts.grid_points));
        } catch (const AnalysisError&) {
            ++failures;
        }
    }
    if (q_values.size() < static_cast<std::size_t>(0.8 * opts.n_resamples))
        throw AnalysisError("bootstrap unstable: more than 20% of refits failed");

    BootstrapResult out;
    out.n_resamples = opts.n_resamples;
    out.n_failures = failures;
    double sum = 0.0;
    for (double q : q_values) sum += q;
    out.mean = sum / static_cast<double>(q_values.size());
    double ss = 0.0;
    for (double q : q_values) ss += (q - out.mean) * (q - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(q_values.size() - 1));

    std::sort(q_values.begin(), q_values.end());
    auto quantile = [&](double p) {
        double pos = p * static_cast<double>(q_values.size() - 1);
        auto lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= q_values.size()) return q_values.back();
        double frac = pos - static_cast<double>(lo);
        return q_values[lo] * (1.0 - frac) + q_values[lo + 1] * frac;
    };
    out.p2_5 = quantile(0.025);
    out.p97_5 = quantile(0.975);
    return out;
}

struct FitSummary {
    double mu_v = 0.0, sigma = 0.0, gamma = 0.0;
    double s_squared = 0.0;
    bool converged = false;
};

struct QRelPoint {
    double tau_s = 0.0;
    std::size_t column = 0;
    std::size_t n_phases = 0;
    double q_rel = 0.0;
    double q_err = std::numeric_limits<double>::quiet_NaN();  // NaN if not bootstrapped
    FitSummary fit;
};

struct TauFailure {
    std::size_t column = 0;
    double tau_s = 0.0;
    std::string reason;
};

struct QRelCurve {
    std::vector<QRelPoint> points;    // successfully fitted columns
    std::vector<TauFailure> failures;
    std::size_t argmin = 0;           // index into points
    double q_rel_min = 0.0;
    double tau_at_min_s = 0.0;
    BootstrapResult min_bootstrap;    // meaningful when bootstrap != None
};

/// q as a function of pulse-relative sampling time: fit each window column
/// independently and take the minimum. Columns whose fit fails are flagged
/// and excluded rather than aborting the curve.
inline QRelCurve qrel_timeseries(const PulsePhaseMatrix& matrix, const QRelOptions& opts) {
    if (matrix.width == 0) throw ParameterError("phase matrix has no columns");
    if (opts.tau_stride == 0) throw ParameterError("tau_stride must be at least 1");

    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < matrix.width; c += opts.tau_stride) cols.push_back(c);

    struct Slot {
        bool ok = false;
        QRelPoint point;
        std::string failure;
    };
    std::vector<Slot> slots(cols.size());

    parallel_for(cols.size(), opts.threads, [&](std::size_t i) {
        const std::size_t c = cols[i];
        Slot& slot = slots[i];
        auto phases = matrix.column_phases(c);
        try {
            if (phases.size() < opts.min_samples)
                throw AnalysisError("only " + std::to_string(phases.size()) +
                                    " valid phases (need " + std::to_string(opts.min_samples) + ")");
            auto hist = PhaseHistogram::from_phases(phases, opts.bins);
            auto fit = fit_wrapped_voigt(hist, std::nullopt, opts.fit);
            slot.point.q_rel = qrel_from_pdf(fit.params, opts.grid_points);
            slot.point.fit = {fit.params.mu_v, fit.params.sigma, fit.params.gamma,
                              fit.s_squared, fit.converged};
            slot.point.tau_s = matrix.tau(c);
            slot.point.column = c;
            slot.point.n_phases = phases.size();
            slot.ok = true;
        } catch (const AnalysisError& e) {
            slot.failure = e.what();
        }
    });

    QRelCurve curve;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].ok)
            curve.points.push_back(slots[i].point);
        else
            curve.failures.push_back({cols[i], matrix.tau(cols[i]), slots[i].failure});
    }
    if (curve.points.empty())
        throw AnalysisError("q estimation failed at every sampling time");

    curve.argmin = 0;
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        if (curve.points[i].q_rel < curve.points[curve.argmin].q_rel) curve.argmin = i;
    curve.q_rel_min = curve.points[curve.argmin].q_rel;
    curve.tau_at_min_s = curve.points[curve.argmin].tau_s;

    if (opts.bootstrap == QRelOptions::Bootstrap::All) {
        parallel_for(curve.points.size(), opts.threads, [&](std::size_t i) {
            auto phases = matrix.column_phases(curve.points[i].column);
            auto boot = bootstrap_qrel(phases, opts, curve.points[i].column);
            curve.points[i].q_err = boot.stddev;
            if (i == curve.argmin) curve.min_bootstrap = boot;
        });
    } else if (opts.bootstrap == QRelOptions::Bootstrap::ArgminOnly) {
        auto phases = matrix.column_phases(curve.points[curve.argmin].column);
        curve.min_bootstrap = bootstrap_qrel(phases, opts, curve.points[curve.argmin].column);
        curve.points[curve.argmin].q_err = curve.min_bootstrap.stddev;
    }
    return curve;
}

struct HistogramBound {
    double q_rel = 0.0;
    int empty_bins = 0;
};

/// Distribution-free lower bound on q from binomial (Clopper-Pearson) lower
/// confidence limits on every bin, Bonferroni-corrected so the whole bound
/// holds with probability 1 - epsilon. Needs >= 20 samples per bin on average.
inline HistogramBound histogram_lower_bound(std::span<const double> phases, int bins,
                                            double epsilon) {
    if (bins < 1) throw ParameterError("histogram bound needs at least 1 bin");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must be in (0, 1)");
    if (phases.size() < static_cast<std::size_t>(20 * bins))
        throw ParameterError("histogram bound needs at least 20 samples per bin on average");

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    const double inv_width = bins / kTwoPi;
    for (double p : phases) {
        auto idx = static_cast<int>((wrap_angle(p) + kPi) * inv_width);
        if (idx < 0) idx = 0;
        if (idx >= bins) idx = bins - 1;
        counts[static_cast<std::size_t>(idx)] += 1;
    }

    const double n = static_cast<double>(phases.size());
    const double alpha = epsilon / bins;
    HistogramBound out;
    double min_p = std::numeric_limits<double>::infinity();
    for (int b = 0; b < bins; ++b) {
        double k = static_cast<double>(counts[static_cast<std::size_t>(b)]);
        double p_lo = 0.0;
        if (k > 0.0) p_lo = boost::math::ibeta_inv(k, n - k + 1.0, alpha);
        else ++out.empty_bins;
        if (p_lo < min_p) min_p = p_lo;
    }
    out.q_rel = bins * min_p;  // = 2*pi * min density bound
    if (out.q_rel > 1.0) out.q_rel = 1.0;
    return out;
}

}  // namespace qrlock
