#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qrlock/power_sweep.hpp"
#include "oracles.hpp"

using namespace qrlock;

namespace {

SweepOptions fast_sweep(std::vector<double> powers) {
    SweepOptions opts;
    opts.powers_dbm = std::move(powers);
    opts.sim.n_pulses = 500;
    opts.analysis.tau_stride = 50;
    return opts;
}

SweepResult hand_sweep(std::initializer_list<std::pair<double, double>> pts) {
    SweepResult r;
    for (auto [p, q] : pts) {
        SweepPoint pt;
        pt.power_dbm = p;
        pt.q_rel_min = q;
        pt.ok = true;
        r.points.push_back(pt);
    }
    return r;
}

}  // namespace

TEST_CASE("sweep options validation") {
    SweepOptions opts;
    opts.powers_dbm = {-50.0};
    CHECK_THROWS_AS(opts.validate(), ParameterError);
    opts.powers_dbm = {-50.0, -50.0};
    CHECK_THROWS_AS(opts.validate(), ParameterError);
    opts.powers_dbm = {-50.0, -60.0};
    CHECK_THROWS_AS(opts.validate(), ParameterError);
    opts.powers_dbm = {-60.0, -50.0};
    opts.validate();
}

TEST_CASE("q falls as injected power rises") {
    auto opts = fast_sweep({-90.0, -70.0, -50.0, -35.0});
    auto result = power_sweep(opts, 77);
    REQUIRE(result.points.size() == 4);

    for (const auto& pt : result.points) {
        REQUIRE(pt.ok);
        CHECK(pt.q_rel_min >= 0.0);
        CHECK(pt.q_rel_min <= 1.0);
        CHECK(pt.q_integrated >= 0.0);
        CHECK(pt.q_integrated <= 1.0);
        CHECK(pt.sigma_at_min > 0.0);
        CHECK(std::isfinite(pt.q_err));          // argmin bootstrap ran
        CHECK(std::isfinite(pt.q_integrated_err));
    }

    // Unlocked end randomizes almost fully; locked end collapses q.
    CHECK(result.points[0].q_rel_min > 0.85);
    CHECK(result.points[3].q_rel_min < 0.1);
    CHECK(result.points[0].q_rel_min > result.points[3].q_rel_min);
    CHECK(result.points[0].q_integrated > result.points[3].q_integrated);

    // The per-sample minimum cannot exceed the integrated estimate by much;
    // both views must agree on the trend.
    CHECK(result.points[1].q_rel_min > result.points[2].q_rel_min);
}

TEST_CASE("sweep is deterministic in the seed") {
    auto opts = fast_sweep({-80.0, -45.0});
    opts.analysis.bootstrap = QRelOptions::Bootstrap::None;
    auto a = power_sweep(opts, 3);
    auto b = power_sweep(opts, 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a.points[i].q_rel_min == b.points[i].q_rel_min);
        CHECK(a.points[i].q_integrated == b.points[i].q_integrated);
    }
    opts.threads = 2;
    auto c = power_sweep(opts, 3);
    for (std::size_t i = 0; i < 2; ++i) CHECK(a.points[i].q_rel_min == c.points[i].q_rel_min);

    auto d = power_sweep(opts, 4);
    CHECK(a.points[1].q_rel_min != d.points[1].q_rel_min);
}

TEST_CASE("isolation threshold interpolates the target crossing") {
    auto sweep = hand_sweep({{-91.0, 0.6}, {-89.0, 0.4}});
    auto iso = isolation_threshold(sweep, 0.5, 100.0);
    CHECK(iso.threshold_dbm == -90.0);
    // 100 W source behind the crossing: 50 dBm - (-90 dBm).
    CHECK(iso.isolation_db == 140.0);
}

TEST_CASE("isolation skips failed points and takes the first crossing") {
    auto sweep = hand_sweep({{-95.0, 0.9}, {-90.0, 0.7}, {-85.0, 0.2}, {-80.0, 0.8}, {-75.0, 0.1}});
    sweep.points[1].ok = false;  // drop the 0.7 point entirely

    auto iso = isolation_threshold(sweep, 0.5, 100.0);
    // Interpolates between -95 (0.9) and -85 (0.2): threshold above -90.
    CHECK(iso.threshold_dbm == Catch::Approx(-95.0 + 10.0 * (0.4 / 0.7)));
    CHECK(iso.isolation_db == Catch::Approx(50.0 - iso.threshold_dbm));
}

TEST_CASE("isolation requires a crossing and sane inputs") {
    auto flat = hand_sweep({{-90.0, 0.9}, {-80.0, 0.8}});
    CHECK_THROWS_AS(isolation_threshold(flat, 0.5, 100.0), AnalysisError);

    auto sweep = hand_sweep({{-91.0, 0.6}, {-89.0, 0.4}});
    CHECK_THROWS_AS(isolation_threshold(sweep, 0.0, 100.0), ParameterError);
    CHECK_THROWS_AS(isolation_threshold(sweep, 1.0, 100.0), ParameterError);
    CHECK_THROWS_AS(isolation_threshold(sweep, 0.5, 0.0), ParameterError);

    // Already below target at the first point: no crossing to report.
    auto low = hand_sweep({{-91.0, 0.3}, {-89.0, 0.2}});
    CHECK_THROWS_AS(isolation_threshold(low, 0.5, 100.0), AnalysisError);
}

TEST_CASE("end-to-end isolation from a simulated sweep") {
    auto opts = fast_sweep({-90.0, -70.0, -55.0, -40.0});
    opts.analysis.bootstrap = QRelOptions::Bootstrap::None;
    auto result = power_sweep(opts, 11);
    auto iso = isolation_threshold(result, 0.5, 100.0);
    CHECK(iso.threshold_dbm > -90.0);
    CHECK(iso.threshold_dbm < -40.0);
    CHECK(iso.isolation_db == Catch::Approx(50.0 - iso.threshold_dbm));
    CHECK(iso.isolation_db > 90.0);
}
