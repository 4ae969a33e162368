#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qrlock/phase_dist.hpp"
#include "qrlock/voigt_fit.hpp"
#include "oracles.hpp"

using namespace qrlock;

namespace {

PhaseHistogram hist_from(const PhaseDistribution& dist, int n, int bins, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> phases(static_cast<std::size_t>(n));
    for (auto& p : phases) p = dist.sample(rng);
    return PhaseHistogram::from_phases(phases, bins);
}

// Counts laid down exactly on the model curve, up to integer rounding.
PhaseHistogram hist_on_model(const WrappedVoigtParams& p, std::uint64_t total, int bins) {
    PhaseHistogram h;
    h.bins = bins;
    h.counts.resize(static_cast<std::size_t>(bins));
    h.total = total;
    auto model = expected_counts(p, h);
    std::uint64_t acc = 0;
    for (int b = 0; b < bins; ++b) {
        auto c = static_cast<std::uint64_t>(std::llround(model[static_cast<std::size_t>(b)]));
        h.counts[static_cast<std::size_t>(b)] = c;
        acc += c;
    }
    h.total = acc;
    return h;
}

}  // namespace

TEST_CASE("residual kernel is the literal sum of squares") {
    std::vector<double> model{1.5, 2.0, 0.0, 4.0};
    std::vector<std::uint64_t> counts{1, 3, 1, 4};
    CHECK(sum_squared_residuals(model, counts) == Catch::Approx(0.25 + 1.0 + 1.0 + 0.0));
}

TEST_CASE("model counts integrate back to the sample total") {
    PhaseHistogram h;
    h.bins = 64;
    h.counts.assign(64, 0);
    h.total = 10000;
    auto model = expected_counts({0.3, 0.4, 0.1, 10}, h);
    double sum = 0.0;
    for (double m : model) sum += m;
    // Midpoint-rule mass of a unit density times the total.
    CHECK(sum == Catch::Approx(10000.0).epsilon(1e-6));
}

TEST_CASE("fit recovers parameters from counts on the model curve") {
    WrappedVoigtParams truth{0.5, 0.4, 0.15, 10};
    auto h = hist_on_model(truth, 50000, 64);
    auto fit = fit_wrapped_voigt(h);
    CHECK(fit.converged);
    CHECK(fit.params.mu_v == Catch::Approx(truth.mu_v).margin(0.01));
    CHECK(fit.params.sigma == Catch::Approx(truth.sigma).epsilon(0.03));
    CHECK(fit.params.gamma == Catch::Approx(truth.gamma).epsilon(0.10));
    // Rounding leaves at most 1/4 per bin of squared residual.
    CHECK(fit.s_squared < 0.25 * 64);
    CHECK(fit.s_squared <= residual_sum(truth, h) + 1e-9);
    CHECK(fit.data_total == h.total);
    CHECK(fit.iterations > 0);
}

TEST_CASE("fit recovers a peak at the wrap seam from samples") {
    auto dist = PhaseDistribution::wrapped_voigt(-2.9, 0.3, 0.1);
    auto h = hist_from(dist, 20000, 64, 404);
    auto fit = fit_wrapped_voigt(h);
    CHECK(fit.converged);
    CHECK(std::abs(angle_diff(fit.params.mu_v, -2.9)) < 0.05);
    CHECK(fit.params.sigma == Catch::Approx(0.3).epsilon(0.15));
    CHECK(fit.params.gamma == Catch::Approx(0.1).margin(0.06));

    // Covariance: symmetric, positive diagonal, plausible scale for n = 20000.
    const auto& c = fit.covariance;
    for (int i = 0; i < 3; ++i) {
        CHECK(c[static_cast<std::size_t>(4 * i)] > 0.0);
        for (int j = 0; j < 3; ++j)
            CHECK(c[static_cast<std::size_t>(3 * i + j)] ==
                  Catch::Approx(c[static_cast<std::size_t>(3 * j + i)]).margin(1e-12));
    }
    double mu_err = std::sqrt(c[0]);
    CHECK(mu_err > 1e-5);
    CHECK(mu_err < 0.05);
}

TEST_CASE("weighted fit agrees with the unweighted one on clean data") {
    auto dist = PhaseDistribution::wrapped_voigt(1.2, 0.5, 0.05);
    auto h = hist_from(dist, 30000, 64, 808);
    FitOptions wopts;
    wopts.poisson_weights = true;
    auto plain = fit_wrapped_voigt(h);
    auto weighted = fit_wrapped_voigt(h, std::nullopt, wopts);
    CHECK(weighted.converged);
    CHECK(std::abs(angle_diff(plain.params.mu_v, weighted.params.mu_v)) < 0.05);
    CHECK(weighted.params.sigma == Catch::Approx(plain.params.sigma).epsilon(0.15));
    // Weighted objective is in different units from the plain sum of squares.
    CHECK(weighted.s_squared != weighted.objective);
    CHECK(plain.s_squared == Catch::Approx(plain.objective));
}

TEST_CASE("explicit initial guess steers a single-start fit") {
    WrappedVoigtParams truth{0.5, 0.35, 0.1, 10};
    auto h = hist_on_model(truth, 40000, 64);
    auto fit = fit_wrapped_voigt(h, WrappedVoigtParams{0.4, 0.5, 0.2, 10});
    CHECK(fit.converged);
    CHECK(fit.params.mu_v == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("fit on near-uniform data reports a wide distribution") {
    auto h = hist_from(PhaseDistribution::uniform(), 8000, 64, 99);
    auto fit = fit_wrapped_voigt(h);
    double width = fit.params.sigma + fit.params.gamma;
    CHECK(width > 1.5);
    // Fitted density stays close to 1/2pi everywhere.
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 256; ++i) {
        double v = wrapped_voigt_pdf(-kPi + kTwoPi * i / 256.0, fit.params);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > 0.8 / kTwoPi);
    CHECK(hi < 1.2 / kTwoPi);
}

TEST_CASE("fit refuses degenerate inputs") {
    // Too few samples.
    auto tiny = hist_from(PhaseDistribution::uniform(), 99, 16, 5);
    CHECK_THROWS_AS(fit_wrapped_voigt(tiny), AnalysisError);

    // All mass in two bins.
    PhaseHistogram spike;
    spike.bins = 16;
    spike.counts.assign(16, 0);
    spike.counts[3] = 150;
    spike.counts[4] = 150;
    spike.total = 300;
    CHECK_THROWS_AS(fit_wrapped_voigt(spike), AnalysisError);

    PhaseHistogram two_bins;
    two_bins.bins = 2;
    CHECK_THROWS_AS(fit_wrapped_voigt(two_bins), ParameterError);
}

TEST_CASE("starving the iteration budget raises a diagnosable error") {
    auto dist = PhaseDistribution::wrapped_voigt(0.0, 0.3, 0.1);
    auto h = hist_from(dist, 20000, 64, 31);
    FitOptions opts;
    opts.max_iterations = 1;
    try {
        fit_wrapped_voigt(h, std::nullopt, opts);
        FAIL("expected FitNonConvergence");
    } catch (const FitNonConvergence& e) {
        CHECK_FALSE(e.best.converged);
        CHECK(e.best.data_total == 20000);
        CHECK(std::isfinite(e.best.objective));
    }
}

TEST_CASE("fit is bitwise deterministic") {
    auto dist = PhaseDistribution::wrapped_voigt(0.9, 0.25, 0.08);
    auto h = hist_from(dist, 15000, 64, 777);
    auto a = fit_wrapped_voigt(h);
    auto b = fit_wrapped_voigt(h);
    CHECK(a.params.mu_v == b.params.mu_v);
    CHECK(a.params.sigma == b.params.sigma);
    CHECK(a.params.gamma == b.params.gamma);
    CHECK(a.s_squared == b.s_squared);
    CHECK(a.iterations == b.iterations);
}
