#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qrlock/phase_dist.hpp"
#include "oracles.hpp"

using namespace qrlock;

namespace {

std::vector<double> draw(const PhaseDistribution& dist, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = dist.sample(rng);
    return out;
}

std::complex<double> moment_by_quadrature(const PhaseDistribution& dist, int j) {
    double re = oracle::integrate([&](double t) { return dist.pdf(t) * std::cos(j * t); },
                                  -oracle::kPi, oracle::kPi, 1e-11);
    double im = oracle::integrate([&](double t) { return dist.pdf(t) * std::sin(j * t); },
                                  -oracle::kPi, oracle::kPi, 1e-11);
    return {re, im};
}

}  // namespace

TEST_CASE("factories validate their parameters") {
    CHECK_THROWS_AS(PhaseDistribution::wrapped_gaussian(0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(PhaseDistribution::wrapped_gaussian(0.0, -1.0), ParameterError);
    CHECK_THROWS_AS(PhaseDistribution::wrapped_cauchy(0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(PhaseDistribution::wrapped_voigt(0.0, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(PhaseDistribution::wrapped_voigt(0.0, -0.1, 0.2), ParameterError);
    CHECK(PhaseDistribution::delta(7.0).center == Catch::Approx(7.0 - kTwoPi));
    CHECK(to_string(PhaseDistKind::WrappedVoigt) == "wrapped_voigt");
    CHECK(to_string(PhaseDistKind::Uniform) == "uniform");
}

TEST_CASE("densities integrate to one on the circle") {
    const PhaseDistribution dists[] = {
        PhaseDistribution::uniform(),
        PhaseDistribution::wrapped_gaussian(1.0, 0.4),
        PhaseDistribution::wrapped_cauchy(-2.0, 0.3),
        PhaseDistribution::wrapped_voigt(0.5, 0.3, 0.2),
        PhaseDistribution::wrapped_voigt(3.0, 2.5, 0.01),
    };
    for (const auto& d : dists) {
        double mass = oracle::integrate([&](double t) { return d.pdf(t); }, -oracle::kPi,
                                        oracle::kPi, 1e-10);
        CHECK(mass == Catch::Approx(1.0).margin(2e-7));
    }
    CHECK_THROWS_AS(PhaseDistribution::delta(0.0).pdf(0.0), ParameterError);
}

TEST_CASE("wrapped Cauchy density agrees with the closed form") {
    auto d = PhaseDistribution::wrapped_cauchy(0.7, 0.35);
    for (double t : {-3.0, -0.5, 0.7, 1.4, 3.1}) {
        CHECK(d.pdf(t) == Catch::Approx(oracle::wrapped_cauchy_pdf(t, 0.7, 0.35)).epsilon(1e-12));
    }
}

TEST_CASE("wrapped Gaussian density agrees with the image sum") {
    auto d = PhaseDistribution::wrapped_gaussian(-1.3, 0.55);
    for (double t : {-3.0, -1.3, 0.0, 2.0}) {
        CHECK(d.pdf(t) ==
              Catch::Approx(oracle::wrapped_gaussian_images(t, -1.3, 0.55)).epsilon(1e-10));
    }
}

TEST_CASE("closed-form circular moments match quadrature") {
    const PhaseDistribution dists[] = {
        PhaseDistribution::wrapped_gaussian(0.8, 0.5),
        PhaseDistribution::wrapped_cauchy(-0.4, 0.25),
        PhaseDistribution::wrapped_voigt(1.9, 0.35, 0.15),
    };
    for (const auto& d : dists) {
        for (int j : {1, 2, 3}) {
            auto closed = d.circular_moment(j);
            auto quad = moment_by_quadrature(d, j);
            CHECK(closed.real() == Catch::Approx(quad.real()).margin(5e-8));
            CHECK(closed.imag() == Catch::Approx(quad.imag()).margin(5e-8));
        }
    }
    CHECK(PhaseDistribution::uniform().circular_moment(1) == std::complex<double>{0.0, 0.0});
    CHECK(std::abs(PhaseDistribution::delta(1.1).circular_moment(2)) == Catch::Approx(1.0));
    CHECK(std::arg(PhaseDistribution::delta(1.1).circular_moment(2)) == Catch::Approx(2.2));
    CHECK(PhaseDistribution::uniform().circular_moment(0) == std::complex<double>{1.0, 0.0});
}

TEST_CASE("uniform sampling is uniform") {
    auto xs = draw(PhaseDistribution::uniform(), 20000, 11);
    for (double x : xs) {
        REQUIRE(x >= -kPi);
        REQUIRE(x < kPi);
    }
    double ks = oracle::ks_distance(xs, [](double x) { return (x + oracle::kPi) / kTwoPi; });
    CHECK(ks < 0.015);
}

TEST_CASE("delta sampling returns the center") {
    auto d = PhaseDistribution::delta(-2.5);
    Rng rng(3);
    for (int i = 0; i < 10; ++i) CHECK(d.sample(rng) == Catch::Approx(-2.5));
}

TEST_CASE("wrapped Gaussian sampling matches its density") {
    auto d = PhaseDistribution::wrapped_gaussian(3.0, 0.6);  // straddles the wrap seam
    auto xs = draw(d, 20000, 17);
    auto cdf = [&](double x) {
        return oracle::integrate([&](double t) { return d.pdf(t); }, -oracle::kPi, x, 1e-10);
    };
    CHECK(oracle::ks_distance(xs, cdf) < 0.015);
}

TEST_CASE("wrapped Voigt sampling matches its density") {
    auto d = PhaseDistribution::wrapped_voigt(-0.7, 0.35, 0.2);
    auto xs = draw(d, 20000, 23);
    auto cdf = [&](double x) {
        return oracle::integrate([&](double t) { return d.pdf(t); }, -oracle::kPi, x, 1e-10);
    };
    CHECK(oracle::ks_distance(xs, cdf) < 0.015);
}

TEST_CASE("sample circular moments converge to the closed forms") {
    const PhaseDistribution dists[] = {
        PhaseDistribution::wrapped_gaussian(0.4, 0.8),
        PhaseDistribution::wrapped_cauchy(2.9, 0.5),
        PhaseDistribution::wrapped_voigt(-1.0, 0.5, 0.3),
    };
    std::uint64_t seed = 1000;
    for (const auto& d : dists) {
        auto xs = draw(d, 40000, seed++);
        for (int j : {1, 2}) {
            auto want = d.circular_moment(j);
            auto got = oracle::sample_circular_moment(xs, j);
            CHECK(std::abs(got - want) < 0.02);
        }
    }
}

TEST_CASE("locking response maps power to concentration") {
    LockingCalibration cal;  // kappa_ref 30 at -40 dBm, square-root growth

    auto at_ref = locking_distribution(-40.0, 1.0, cal);
    REQUIRE(at_ref.kind == PhaseDistKind::WrappedGaussian);
    CHECK(at_ref.sigma == Catch::Approx(1.0 / std::sqrt(30.0)));
    CHECK(at_ref.center == 0.0);

    // +20 dB injected power: kappa grows by 10, sigma shrinks by sqrt(10).
    auto hot = locking_distribution(-20.0, 1.0, cal);
    CHECK(hot.sigma == Catch::Approx(at_ref.sigma / std::sqrt(std::sqrt(100.0))).epsilon(1e-12));

    // Imperfect polarization coupling attenuates like power.
    auto quarter = locking_distribution(-40.0, 0.25, cal);
    auto same = locking_distribution(-40.0 - 10.0 * std::log10(4.0), 1.0, cal);
    CHECK(quarter.sigma == Catch::Approx(same.sigma).epsilon(1e-12));

    // Vanishing injection: fully random phase.
    CHECK(locking_distribution(-300.0, 1.0, cal).kind == PhaseDistKind::Uniform);
    CHECK(locking_distribution(-40.0, 0.0, cal).kind == PhaseDistKind::Uniform);

    // Strong attack leaves a nearly deterministic phase.
    auto strong = locking_distribution(-20.0, 1.0, cal);
    CHECK(strong.sigma < 0.1);

    // Weak leak at -90 dBm barely concentrates the phase.
    auto weak = locking_distribution(-90.0, 1.0, cal);
    REQUIRE(weak.kind == PhaseDistKind::WrappedGaussian);
    CHECK(weak.sigma > 3.0);

    LockingCalibration shifted = cal;
    shifted.lock_phase_rad = 1.25;
    CHECK(locking_distribution(-30.0, 1.0, shifted).center == Catch::Approx(1.25));

    CHECK_THROWS_AS(locking_distribution(-40.0, -0.1, cal), ParameterError);
    CHECK_THROWS_AS(locking_distribution(-40.0, 1.5, cal), ParameterError);
}
