#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qrlock/errors.hpp"
#include "qrlock/histogram.hpp"
#include "qrlock/wrapped_voigt.hpp"

namespace qrlock {

struct FitOptions {
    int max_iterations = 500;
    double step_tol = 1e-8;     // max internal parameter step
    double s2_rel_tol = 1e-10;  // relative objective change
    bool poisson_weights = false;
    int k_max = 10;
    bool multistart = true;  // try 4 centers rotated by pi/2
};

struct FitResult {
    WrappedVoigtParams params;
    double s_squared = 0.0;  // sum of squared (model - count) residuals, unweighted
    double objective = 0.0;  // minimized objective (equals s_squared when unweighted)
    int iterations = 0;
    bool converged = false;
    std::uint64_t data_total = 0;
    // Row-major 3x3 covariance of (mu_v, sigma, gamma); NaN if not available.
    std::array<double, 9> covariance{};
};

/// Thrown when no fit start converges. Carries the best attempt.
struct FitNonConvergence : AnalysisError {
    FitResult best;
    explicit FitNonConvergence(FitResult b)
        : AnalysisError("wrapped Voigt fit did not converge"), best(std::move(b)) {}
};

/// Definitional residual kernel: sum_b (model_b - count_b)^2.
inline double sum_squared_residuals(std::span<const double> model,
                                    std::span<const std::uint64_t> counts) {
    if (model.size() != counts.size())
        throw ParameterError("model and counts must have equal length");
    double s = 0.0;
    for (std::size_t b = 0; b < model.size(); ++b) {
        double r = model[b] - static_cast<double>(counts[b]);
        s += r * r;
    }
    return s;
}

/// Model histogram: expected counts N * bin_width * f_w(center_b).
inline std::vector<double> expected_counts(const WrappedVoigtParams& p,
                                           const PhaseHistogram& hist) {
    std::vector<double> model(static_cast<std::size_t>(hist.bins));
    const double scale = static_cast<double>(hist.total) * hist.bin_width();
    for (int b = 0; b < hist.bins; ++b)
        model[static_cast<std::size_t>(b)] = scale * wrapped_voigt_pdf(hist.center(b), p);
    return model;
}

/// S^2 of a parameter set against a histogram (model scaled to count units).
inline double residual_sum(const WrappedVoigtParams& p, const PhaseHistogram& hist) {
    auto model = expected_counts(p, hist);
    return sum_squared_residuals(model, hist.counts);
}

namespace detail {

// Internal fit coordinates: q = (mu, ln sigma, sqrt gamma). Keeps sigma > 0
// and gamma >= 0 without constrained steps.
struct FitCoords {
    double mu, ls, qg;

    WrappedVoigtParams to_params(int k_max) const {
        double ls_c = ls < -30.0 ? -30.0 : (ls > 6.0 ? 6.0 : ls);
        return WrappedVoigtParams{mu, std::exp(ls_c), qg * qg, k_max};
    }
};

// Solve a 3x3 linear system in place; returns false if singular.
inline bool solve3(std::array<double, 9> a, std::array<double, 3> b, std::array<double, 3>& x) {
    std::array<int, 3> piv{0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[piv[r] * 3 + col]) > std::abs(a[piv[best] * 3 + col])) best = r;
        std::swap(piv[col], piv[best]);
        double pivot = a[piv[col] * 3 + col];
        if (std::abs(pivot) < 1e-300) return false;
        for (int r = col + 1; r < 3; ++r) {
            double f = a[piv[r] * 3 + col] / pivot;
            for (int c = col; c < 3; ++c) a[piv[r] * 3 + c] -= f * a[piv[col] * 3 + c];
            b[piv[r]] -= f * b[piv[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = b[piv[row]];
        for (int c = row + 1; c < 3; ++c) acc -= a[piv[row] * 3 + c] * x[c];
        x[row] = acc / a[piv[row] * 3 + row];
    }
    return true;
}

struct LmWorkspace {
    const PhaseHistogram* hist;
    const FitOptions* opts;
    std::vector<double> weights;

    std::vector<double> residuals(const FitCoords& q) const {
        auto p = q.to_params(opts->k_max);
        std::vector<double> r(static_cast<std::size_t>(hist->bins));
        const double scale = static_cast<double>(hist->total) * hist->bin_width();
        for (int b = 0; b < hist->bins; ++b) {
            double model = scale * wrapped_voigt_pdf(hist->center(b), p);
            r[static_cast<std::size_t>(b)] =
                weights[static_cast<std::size_t>(b)] *
                (model - static_cast<double>(hist->counts[static_cast<std::size_t>(b)]));
        }
        return r;
    }

    static double norm2(std::span<const double> v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    }
};

struct LmOutcome {
    FitCoords q;
    double objective;
    int iterations;
    bool converged;
};

inline LmOutcome levenberg_marquardt(const LmWorkspace& ws, FitCoords q) {
    const FitOptions& opts = *ws.opts;
    const int nb = ws.hist->bins;

    auto r = ws.residuals(q);
    double obj = LmWorkspace::norm2(r);
    double lambda = 1e-3;
    int iter = 0;
    bool converged = false;

    std::vector<double> jac(static_cast<std::size_t>(nb) * 3);
    while (iter < opts.max_iterations && !converged) {
        ++iter;

        // Forward-difference Jacobian of the residual vector.
        std::array<double, 3> base{q.mu, q.ls, q.qg};
        for (int j = 0; j < 3; ++j) {
            double h = 1e-6 * (1.0 + std::abs(base[j]));
            FitCoords qh = q;
            (j == 0 ? qh.mu : j == 1 ? qh.ls : qh.qg) += h;
            auto rh = ws.residuals(qh);
            for (int b = 0; b < nb; ++b)
                jac[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(j)] =
                    (rh[static_cast<std::size_t>(b)] - r[static_cast<std::size_t>(b)]) / h;
        }

        std::array<double, 9> jtj{};
        std::array<double, 3> jtr{};
        for (int b = 0; b < nb; ++b) {
            const double* row = &jac[static_cast<std::size_t>(b) * 3];
            for (int i = 0; i < 3; ++i) {
                jtr[i] += row[i] * r[static_cast<std::size_t>(b)];
                for (int j = i; j < 3; ++j) jtj[i * 3 + j] += row[i] * row[j];
            }
        }
        jtj[3] = jtj[1];
        jtj[6] = jtj[2];
        jtj[7] = jtj[5];

        double gmax = std::max({std::abs(jtr[0]), std::abs(jtr[1]), std::abs(jtr[2])});
        if (gmax < 1e-12 * (obj > 1.0 ? obj : 1.0)) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (!accepted && lambda <= 1e12) {
            std::array<double, 9> a = jtj;
            for (int d = 0; d < 3; ++d) {
                double dd = jtj[d * 3 + d];
                a[d * 3 + d] += lambda * (dd > 1e-30 ? dd : 1e-30);
            }
            std::array<double, 3> step{};
            std::array<double, 3> rhs{-jtr[0], -jtr[1], -jtr[2]};
            if (!solve3(a, rhs, step)) {
                lambda *= 5.0;
                continue;
            }
            FitCoords qt{q.mu + step[0], q.ls + step[1], q.qg + step[2]};
            auto rt = ws.residuals(qt);
            double ot = LmWorkspace::norm2(rt);
            if (ot <= obj) {
                double delta = obj - ot;
                double step_max =
                    std::max({std::abs(step[0]), std::abs(step[1]), std::abs(step[2])});
                q = qt;
                r = std::move(rt);
                accepted = true;
                lambda = lambda / 3.0 > 1e-12 ? lambda / 3.0 : 1e-12;
                if (step_max < opts.step_tol || delta <= opts.s2_rel_tol * (obj > 1e-300 ? obj : 1e-300))
                    converged = true;
                obj = ot;
            } else {
                lambda *= 5.0;
            }
        }
        if (!accepted) break;  // stalled against lambda ceiling
    }
    return LmOutcome{q, obj, iter, converged};
}

inline std::array<double, 9> fit_covariance(const LmWorkspace& ws, const FitCoords& q,
                                            double objective) {
    const int nb = ws.hist->bins;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 9> out;
    out.fill(nan);
    if (nb <= 3) return out;

    auto r = ws.residuals(q);
    std::array<double, 3> base{q.mu, q.ls, q.qg};
    std::vector<double> jac(static_cast<std::size_t>(nb) * 3);
    for (int j = 0; j < 3; ++j) {
        double h = 1e-6 * (1.0 + std::abs(base[j]));
        FitCoords qh = q;
        (j == 0 ? qh.mu : j == 1 ? qh.ls : qh.qg) += h;
        auto rh = ws.residuals(qh);
        for (int b = 0; b < nb; ++b)
            jac[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(j)] =
                (rh[static_cast<std::size_t>(b)] - r[static_cast<std::size_t>(b)]) / h;
    }
    std::array<double, 9> jtj{};
    for (int b = 0; b < nb; ++b) {
        const double* row = &jac[static_cast<std::size_t>(b) * 3];
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) jtj[i * 3 + j] += row[i] * row[j];
    }
    jtj[3] = jtj[1];
    jtj[6] = jtj[2];
    jtj[7] = jtj[5];

    // Invert JtJ column by column.
    std::array<double, 9> inv;
    for (int c = 0; c < 3; ++c) {
        std::array<double, 3> e{}, x{};
        e[c] = 1.0;
        if (!solve3(jtj, e, x)) return out;
        inv[c] = x[0];
        inv[3 + c] = x[1];
        inv[6 + c] = x[2];
    }

    // Chain rule back to (mu, sigma, gamma).
    double sigma = std::exp(q.ls);
    std::array<double, 3> scale{1.0, sigma, 2.0 * q.qg};
    double var_scale = objective / (nb - 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i * 3 + j] = scale[i] * scale[j] * inv[i * 3 + j] * var_scale;
    return out;
}

}  // namespace detail

/// Fit a wrapped Voigt profile to a phase histogram by damped least squares.
///
/// Without an explicit initial guess the fit starts from circular statistics
/// of the histogram and, when opts.multistart is set, retries with the center
/// rotated by pi/2, pi, 3pi/2; the converged start with the lowest objective
/// wins. Throws FitNonConvergence (carrying the best attempt) if no start
/// converges, and AnalysisError for degenerate input (total < 100 samples or
/// fewer than 3 occupied bins).
inline FitResult fit_wrapped_voigt(const PhaseHistogram& hist,
                                   std::optional<WrappedVoigtParams> init = std::nullopt,
                                   const FitOptions& opts = {}) {
    if (hist.bins < 4) throw ParameterError("fit needs at least 4 bins");
    if (hist.total < 100)
        throw AnalysisError("fit refused: fewer than 100 phase samples");
    if (hist.nonzero_bins() < 3)
        throw AnalysisError("fit refused: fewer than 3 occupied histogram bins");

    detail::LmWorkspace ws;
    ws.hist = &hist;
    ws.opts = &opts;
    ws.weights.assign(static_cast<std::size_t>(hist.bins), 1.0);
    if (opts.poisson_weights)
        for (int b = 0; b < hist.bins; ++b) {
            double c = static_cast<double>(hist.counts[static_cast<std::size_t>(b)]);
            ws.weights[static_cast<std::size_t>(b)] = 1.0 / std::sqrt(c > 1.0 ? c : 1.0);
        }

    std::vector<detail::FitCoords> starts;
    if (init) {
        double s = init->sigma > 1e-13 ? init->sigma : 1e-13;
        starts.push_back({init->mu_v, std::log(s), std::sqrt(init->gamma > 0.0 ? init->gamma : 0.0)});
    } else {
        // Circular moments of the binned data seed the shape parameters.
        double cx = 0.0, sx = 0.0;
        for (int b = 0; b < hist.bins; ++b) {
            double c = static_cast<double>(hist.counts[static_cast<std::size_t>(b)]);
            cx += c * std::cos(hist.center(b));
            sx += c * std::sin(hist.center(b));
        }
        double n = static_cast<double>(hist.total);
        double rbar = std::sqrt(cx * cx + sx * sx) / n;
        double mu0 = std::atan2(sx, cx);
        double sigma0 = rbar < 1e-9 ? 10.0 : std::sqrt(-2.0 * std::log(rbar));
        sigma0 = sigma0 < 0.05 ? 0.05 : (sigma0 > 10.0 ? 10.0 : sigma0);
        double gamma0 = sigma0 / 4.0;
        int n_starts = opts.multistart ? 4 : 1;
        for (int k = 0; k < n_starts; ++k)
            starts.push_back({wrap_angle(mu0 + 0.5 * kPi * k), std::log(sigma0), std::sqrt(gamma0)});
    }

    bool have_best = false, have_converged = false;
    detail::LmOutcome best{};
    for (const auto& s : starts) {
        auto out = detail::levenberg_marquardt(ws, s);
        bool better = !have_best ||
                      (out.converged && !have_converged) ||
                      (out.converged == have_converged && out.objective < best.objective);
        if (better) {
            best = out;
            have_best = true;
            have_converged = out.converged;
        }
    }

    FitResult result;
    result.params = best.q.to_params(opts.k_max);
    result.params.mu_v = wrap_angle(result.params.mu_v);
    result.objective = best.objective;
    result.s_squared = residual_sum(result.params, hist);
    result.iterations = best.iterations;
    result.converged = best.converged;
    result.data_total = hist.total;
    result.covariance = detail::fit_covariance(ws, best.q, best.objective);
    if (!best.converged) throw FitNonConvergence(result);
    return result;
}

}  // namespace qrlock
