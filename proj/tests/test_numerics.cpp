#include <doctest.h>

#include <cmath>
#include <random>

#include "reflectionless/errors.hpp"
#include "reflectionless/identities.hpp"
#include "reflectionless/numerics.hpp"

using namespace refl;

TEST_CASE("finite-difference spectrum") {
    const auto two = SolitonConfig::make({1, 2}, {6, 12});
    const SpectrumResult s = bound_spectrum([&](double x) { return potential(two, x); }, 12.0, 1e-3);
    REQUIRE(s.energies.size() == 2);
    CHECK(std::abs(s.energies[0] + 4.0) < 5e-4);
    CHECK(std::abs(s.energies[1] + 1.0) < 5e-4);
    CHECK(bound_spectrum([](double) { return 0.0; }, 10.0, 1e-2).energies.empty());
    CHECK_THROWS_AS(bound_spectrum([&](double x) { return potential(two, x); }, 3.0, 1e-3), DomainError);

    const SolitonConfig cfg = random_config(3, 3);
    const SpectrumResult r = bound_spectrum(cfg);
    REQUIRE(r.energies.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(r.energies[static_cast<std::size_t>(j)] + std::pow(cfg.k[static_cast<std::size_t>(2 - j)], 2)) < 1e-3);
}

TEST_CASE("spectrum converges at second order") {
    const auto two = SolitonConfig::make({1, 2}, {6, 12});
    auto u = [&](double x) { return potential(two, x); };
    const double e1 = bound_spectrum(u, 12.0, 0.02).energies[0] + 4.0;
    const double e2 = bound_spectrum(u, 12.0, 0.01).energies[0] + 4.0;
    const double ratio = e1 / e2;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("scattering off reflectionless potentials") {
    const ScatteringResult free = scatter([](double) { return 0.0; }, 1.0);
    CHECK(std::abs(free.reflection_amp) < 1e-9);
    CHECK(std::abs(free.transmission_amp - 1.0) < 1e-8);
    const SolitonConfig cfg = random_config(14, 3);
    for (double k : {0.5, 1.7, 3.1}) {
        const ScatteringResult s = scatter([&](double x) { return potential(cfg, x); }, k);
        CHECK(std::abs(s.reflection_amp) < 1e-6);
        CHECK(s.unitarity_defect < 1e-6);
        CHECK(std::abs(std::arg(s.transmission_amp / reflectionless_transmission(cfg.k, k))) < 1e-5);
    }
    // a generic well reflects
    const ScatteringResult well = scatter([](double x) { return -1.0 / std::cosh(x) / std::cosh(x); }, 0.5);
    CHECK(std::abs(well.reflection_amp) > 1e-2);
    CHECK(well.unitarity_defect < 1e-6);
    CHECK_THROWS_AS(scatter([](double) { return 0.0; }, -1.0), UsageError);
}

TEST_CASE("quadrature") {
    CHECK(quadrature([](double x) { return x; }, 0.0, 1.0, 1e-12) == doctest::Approx(0.5));
    const auto one = SolitonConfig::make({1}, {2});
    const double norm = quadrature_line([&](double x) { return std::pow(eigenfunction(one, 1, x, 0)[0], 2); }, 5.0, 1e-12);
    CHECK(norm == doctest::Approx(0.5).epsilon(1e-10));
    const SolitonConfig cfg = random_config(15, 3);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> xd(-4.0, 4.0);
    for (int i = 0; i < 10; ++i) {
        const double x = xd(rng);
        const double q = quadrature([&](double y) { return eigenfunction(cfg, 1, y, 0)[0] * eigenfunction(cfg, 2, y, 0)[0]; },
                                    x, x + 60.0 / cfg.k[0], 1e-12);
        CHECK(std::abs(q - inner_tail(cfg, 1, 2, x)) < 1e-8);
    }
}

TEST_CASE("KdV residual") {
    CHECK(kdv_residual(SolitonConfig{}, 0.0, 0.0) == 0.0);
    const auto one = SolitonConfig::make({1.2}, {0.9});
    for (double x : {-2.0, 0.0, 1.0})
        for (double t : {-0.2, 0.3}) CHECK(kdv_residual(one, x, t) < 1e-9);
    const SolitonConfig cfg = random_config(16, 3);
    double worst = 0.0;
    for (double x : linspace(-6, 6, 25))
        for (double t : linspace(-0.3, 0.3, 7)) worst = std::max(worst, kdv_residual(cfg, x, t));
    CHECK(worst < 1e-8);
}

TEST_CASE("two-soliton phase shift") {
    const auto two = SolitonConfig::make({1, 2}, {1, 1});
    const PhaseShiftReport r = phase_shift_check(two, 3.0);
    CHECK(r.max_deviation < 1e-3);
    CHECK(r.expected_shift_fast == doctest::Approx(std::log(1.0 / 9.0) / 4.0));
    const PhaseShiftReport moved = phase_shift_check(SolitonConfig::make({1, 2}, {40, 1}), 3.0);
    CHECK(moved.max_deviation < 1e-3);
    CHECK(std::abs(moved.expected_shift_slow - r.expected_shift_slow) < 1e-3);
    CHECK_THROWS_AS(phase_shift_check(two, 0.1), DomainError);
    CHECK_THROWS_AS(phase_shift_check(SolitonConfig::make({1}, {1}), 3.0), UsageError);
}
