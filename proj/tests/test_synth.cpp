#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrlock/heterodyne.hpp"
#include "qrlock/phase_dist.hpp"
#include "qrlock/pulse_train.hpp"
#include "qrlock/sim_config.hpp"
#include "oracles.hpp"

using namespace qrlock;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.n_pulses = 200;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("simulation timing arithmetic") {
    SimConfig cfg;
    CHECK(cfg.samples_per_period() == 1250);  // 50 GS/s over 40 MHz
    CHECK(cfg.period_s() == Catch::Approx(25e-9));
    CHECK(cfg.on_window_s() == Catch::Approx(12.5e-9));
    CHECK(cfg.sample_period_s() == Catch::Approx(2e-11));
    CHECK(cfg.total_time_s() == Catch::Approx(8000 * 25e-9));
    cfg.validate();
}

TEST_CASE("simulation config rejects bad parameters") {
    auto broken = [](auto mutate) {
        SimConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.duty_cycle = 0.0; }).validate(), ParameterError);
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.duty_cycle = 1.0; }).validate(), ParameterError);
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.sample_rate_hz = 1e8; }).validate(),
                    ParameterError);  // under 8 samples per period
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.rise_time_s = 7e-9; }).validate(),
                    ParameterError);  // longer than half the on-window
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.detector_imbalance = 1.0; }).validate(),
                    ParameterError);
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.noise_rms_v = -0.1; }).validate(), ParameterError);
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.n_pulses = 0; }).validate(), ParameterError);
    CHECK_THROWS_AS(broken([](SimConfig& c) { c.lo_amplitude = 0.0; }).validate(), ParameterError);
}

TEST_CASE("raised cosine envelope shape") {
    SimConfig cfg;  // on-window 12.5 ns, rise 1 ns
    const double t_on = cfg.on_window_s();
    const double r = cfg.rise_time_s;

    CHECK(envelope_value(cfg, -1e-12) == 0.0);
    CHECK(envelope_value(cfg, t_on) == 0.0);
    CHECK(envelope_value(cfg, t_on + 1e-12) == 0.0);
    CHECK(envelope_value(cfg, 0.0) == 0.0);
    CHECK(envelope_value(cfg, 0.5 * r) == Catch::Approx(0.5));
    CHECK(envelope_value(cfg, r) == Catch::Approx(1.0));
    CHECK(envelope_value(cfg, 0.5 * t_on) == 1.0);
    CHECK(envelope_value(cfg, t_on - 0.5 * r) == Catch::Approx(0.5));
    // Symmetry of rise and fall.
    for (double f : {0.1, 0.3, 0.7}) {
        CHECK(envelope_value(cfg, f * r) == Catch::Approx(envelope_value(cfg, t_on - f * r)));
    }
}

TEST_CASE("gaussian envelope shape") {
    SimConfig cfg;
    cfg.envelope = EnvelopeKind::Gaussian;
    const double t_on = cfg.on_window_s();
    CHECK(envelope_value(cfg, 0.5 * t_on) == 1.0);
    CHECK(envelope_value(cfg, 0.5 * t_on + t_on / 6.0) == Catch::Approx(std::exp(-0.5)));
    CHECK(envelope_value(cfg, -1e-12) == 0.0);
    CHECK(envelope_value(cfg, t_on) == 0.0);
    CHECK(envelope_value(cfg, 0.1 * t_on) ==
          Catch::Approx(envelope_value(cfg, 0.9 * t_on)).epsilon(1e-12));
}

TEST_CASE("pulse train draws phases per pulse deterministically") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 5000;
    auto train = generate_pulse_train(cfg, PhaseDistribution::uniform());
    REQUIRE(train.true_phases.size() == 5000);
    CHECK(train.samples_per_period == cfg.samples_per_period());

    double ks = oracle::ks_distance(train.true_phases,
                                    [](double x) { return (x + oracle::kPi) / kTwoPi; });
    CHECK(ks < 0.025);

    auto again = generate_pulse_train(cfg, PhaseDistribution::uniform());
    CHECK(train.true_phases == again.true_phases);

    cfg.seed = 12;
    auto other = generate_pulse_train(cfg, PhaseDistribution::uniform());
    CHECK(train.true_phases != other.true_phases);

    auto locked = generate_pulse_train(cfg, PhaseDistribution::delta(0.4));
    for (double p : locked.true_phases) REQUIRE(p == Catch::Approx(0.4));

    cfg.chirp_rate_rad_per_s = 3e8;
    auto chirped = generate_pulse_train(cfg, PhaseDistribution::uniform());
    for (double c : chirped.chirp_rates) REQUIRE(c == 3e8);
}

TEST_CASE("LO drift stays inside the configured bound and attains it") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 3000;
    cfg.lo_drift_bound_rad = 5e-4;
    auto lo = generate_lo_model(cfg);
    REQUIRE(lo.phase_per_pulse.size() == 3000);
    CHECK(lo.phase_per_pulse[0] == 0.0);
    double peak = 0.0;
    for (double p : lo.phase_per_pulse) peak = std::max(peak, std::abs(p));
    CHECK(peak == Catch::Approx(5e-4).epsilon(1e-12));

    cfg.lo_drift_bound_rad = 0.0;
    auto still = generate_lo_model(cfg);
    for (double p : still.phase_per_pulse) REQUIRE(p == 0.0);
}

TEST_CASE("hybrid outputs follow the two-quadrature beat identity") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 3;
    cfg.noise_rms_v = 0.0;
    cfg.lo_drift_bound_rad = 0.0;
    cfg.detector_imbalance = 0.0;
    cfg.signal_amplitude = 0.8;
    cfg.lo_amplitude = 0.6;

    auto train = generate_pulse_train(cfg, PhaseDistribution::delta(0.7));
    auto lo = generate_lo_model(cfg);
    auto wf = synthesize_heterodyne(train, lo, cfg);
    REQUIRE(wf.i0_v.size() == 3 * cfg.samples_per_period());

    const std::size_t period = train.samples_per_period;
    for (std::size_t j : {std::size_t{0}, period / 4, period / 2, period - 1}) {
        double a_s = cfg.signal_amplitude * envelope_value(cfg, static_cast<double>(j) * 2e-11);
        double want0 = 2.0 * a_s * 0.6 * std::cos(0.7);
        double want90 = 2.0 * a_s * 0.6 * std::sin(0.7);
        CHECK(wf.i0_v[j] == Catch::Approx(want0).margin(1e-12));
        CHECK(wf.i90_v[j] == Catch::Approx(want90).margin(1e-12));
    }
}

TEST_CASE("detector imbalance leaks the common mode") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 1;
    cfg.noise_rms_v = 0.0;
    cfg.lo_drift_bound_rad = 0.0;
    cfg.detector_imbalance = 0.07;

    auto train = generate_pulse_train(cfg, PhaseDistribution::delta(-1.1));
    auto lo = generate_lo_model(cfg);
    auto wf = synthesize_heterodyne(train, lo, cfg);

    const std::size_t j = train.samples_per_period / 2;
    double a_s = cfg.signal_amplitude * envelope_value(cfg, static_cast<double>(j) * 2e-11);
    double a_lo = cfg.lo_amplitude;
    double common = 0.07 * (a_s * a_s + a_lo * a_lo);
    CHECK(wf.i0_v[j] == Catch::Approx(common + 2 * a_s * a_lo * std::cos(-1.1)).margin(1e-12));
    CHECK(wf.i90_v[j] == Catch::Approx(common + 2 * a_s * a_lo * std::sin(-1.1)).margin(1e-12));
}

TEST_CASE("chirp advances the beat phase linearly inside the pulse") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 1;
    cfg.noise_rms_v = 0.0;
    cfg.lo_drift_bound_rad = 0.0;
    cfg.chirp_rate_rad_per_s = 2e8;

    auto train = generate_pulse_train(cfg, PhaseDistribution::delta(0.2));
    auto lo = generate_lo_model(cfg);
    auto wf = synthesize_heterodyne(train, lo, cfg);

    auto phase_at = [&](std::size_t j) { return std::atan2(wf.i90_v[j], wf.i0_v[j]); };
    const double dt = cfg.sample_period_s();
    std::size_t a = 150, b = 400;  // inside the flat top
    double expected = 2e8 * dt * static_cast<double>(b - a);
    CHECK(angle_diff(phase_at(b), phase_at(a)) == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("additive noise has the configured scale") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 40;
    cfg.lo_drift_bound_rad = 0.0;

    auto train = generate_pulse_train(cfg, PhaseDistribution::delta(0.0));
    auto lo = generate_lo_model(cfg);
    auto clean = synthesize_heterodyne(train, lo, cfg);

    cfg.noise_rms_v = 0.02;
    auto noisy = synthesize_heterodyne(train, lo, cfg);

    double ss = 0.0;
    for (std::size_t i = 0; i < clean.i0_v.size(); ++i) {
        double d = noisy.i0_v[i] - clean.i0_v[i];
        ss += d * d;
    }
    double rms = std::sqrt(ss / static_cast<double>(clean.i0_v.size()));
    CHECK(rms == Catch::Approx(0.02).epsilon(0.02));
}

TEST_CASE("synthesis is identical for any thread count") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 64;
    cfg.noise_rms_v = 0.01;
    auto train = generate_pulse_train(cfg, PhaseDistribution::uniform());
    auto lo = generate_lo_model(cfg);
    auto one = synthesize_heterodyne(train, lo, cfg, 1);
    auto four = synthesize_heterodyne(train, lo, cfg, 4);
    CHECK(one.i0_v == four.i0_v);
    CHECK(one.i90_v == four.i90_v);
}

TEST_CASE("waveform pair validation") {
    WaveformPair wf;
    wf.sample_period_s = 2e-11;
    wf.i0_v = {1.0, 2.0};
    wf.i90_v = {1.0};
    CHECK_THROWS_AS(wf.validate(), ParameterError);
    wf.i90_v = {1.0, 2.0};
    wf.validate();
    wf.sample_period_s = 0.0;
    CHECK_THROWS_AS(wf.validate(), ParameterError);
}

TEST_CASE("synthesis rejects mismatched inputs") {
    SimConfig cfg = small_config();
    cfg.n_pulses = 4;
    auto train = generate_pulse_train(cfg, PhaseDistribution::uniform());
    auto lo = generate_lo_model(cfg);
    lo.phase_per_pulse.pop_back();
    CHECK_THROWS_AS(synthesize_heterodyne(train, lo, cfg), ParameterError);
}
