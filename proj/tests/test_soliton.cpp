#include <doctest.h>

#include <cmath>
#include <random>

#include "reflectionless/errors.hpp"
#include "reflectionless/identities.hpp"
#include "reflectionless/numerics.hpp"
#include "reflectionless/soliton.hpp"

using namespace refl;

namespace {

SolitonConfig sech2_config(int n) {
    std::vector<double> k, c;
    auto fact = [](int m) { return std::tgamma(m + 1.0); };
    for (int j = 1; j <= n; ++j) {
        k.push_back(j);
        c.push_back(fact(n + j) / (fact(j) * fact(j - 1) * fact(n - j)));
    }
    return SolitonConfig::make(k, c);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(SolitonConfig::make({}, {}));
    CHECK_THROWS_WITH_AS(SolitonConfig::make({2, 1}, {1, 1}), "k not strictly ascending", ValidationError);
    CHECK_THROWS_AS(SolitonConfig::make({1, 1}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(SolitonConfig::make({1}, {0}), ValidationError);
    CHECK_THROWS_AS(SolitonConfig::make({1}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(SolitonConfig::make({-1}, {1}), ValidationError);
    CHECK_THROWS_AS(SolitonConfig::make({1}, {1}, {{2, 0.1}}), ValidationError);
    CHECK(SolitonConfig::make({1, 3}, {1, 1}).energies() == std::vector<double>{-1, -9});
}

TEST_CASE("tau function values") {
    const auto one = SolitonConfig::make({1}, {2});
    CHECK(tau_det(one, 0.0, 0).scaled().expanded()[0] == doctest::Approx(2.0));
    CHECK(tau_hirota(one, 0.0).value() == doctest::Approx(2.0));
    const auto two = SolitonConfig::make({1, 2}, {6, 12});
    CHECK(tau_det(two, 0.0, 0).scaled().expanded()[0] == doctest::Approx(8.0));
    CHECK(tau_hirota(two, 0.0).value() == doctest::Approx(8.0));
    CHECK(tau_hirota(SolitonConfig{}, 1.0).value() == 1.0);
    for (double x : {-3.0, -0.4, 0.7, 2.5}) {
        const double closed = -6.0 * x + 3.0 * std::log1p(std::exp(2.0 * x));
        const TauEval t = tau_det(two, x, 0);
        CHECK(std::log(t.jet[0]) + t.gauge_exponent == doctest::Approx(closed).epsilon(1e-13));
    }
    SolitonConfig big;
    for (int i = 1; i <= 25; ++i) {
        big.k.push_back(i);
        big.c.push_back(1);
    }
    CHECK_THROWS_AS(tau_hirota(big, 0.0), UsageError);
}

TEST_CASE("determinant and Hirota forms agree on random configs") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const SolitonConfig cfg = random_config(rng(), n);
        for (double x : linspace(-5.0 / cfg.k[0], 5.0 / cfg.k[0], 41)) {
            const TauEval d = tau_det(cfg, x, 0);
            const LogValue h = tau_hirota(cfg, x);
            CHECK(d.jet[0] > 0.0);
            worst = std::max(worst, std::abs(std::expm1(std::log(d.jet[0]) + d.gauge_exponent - h.log_abs)));
        }
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("potential: closed forms, decay, negativity") {
    CHECK(potential(SolitonConfig::make({1}, {2}), 0.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(potential(sech2_config(2), 0.0) == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(potential(SolitonConfig{}, 3.0) == 0.0);
    for (int n = 1; n <= 5; ++n) {
        const SolitonConfig cfg = sech2_config(n);
        double worst = 0.0;
        for (double x : linspace(-8, 8, 801)) {
            const double s = 1.0 / std::cosh(x);
            worst = std::max(worst, std::abs(potential(cfg, x) + n * (n + 1) * s * s));
        }
        CHECK(worst < 1e-10);
    }
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const SolitonConfig cfg = random_config(rng(), 1 + static_cast<int>(rng() % 5));
        CHECK(std::abs(potential(cfg, 30.0 / cfg.k[0])) < 1e-10);
        CHECK(std::abs(potential(cfg, -30.0 / cfg.k[0])) < 1e-10);
        for (double x : default_grid(cfg, 201)) CHECK(potential(cfg, x) < 0.0);
    }
}

TEST_CASE("scaling c equals translating x for one soliton") {
    const double k = 1.3, d = 0.7;
    const auto a = SolitonConfig::make({k}, {2.0});
    const auto b = SolitonConfig::make({k}, {2.0 * std::exp(2.0 * k * d)});
    for (double x : {-2.0, 0.0, 1.5}) CHECK(potential(b, x + d) == doctest::Approx(potential(a, x)).epsilon(1e-12));
}

TEST_CASE("coefficient rules") {
    const auto one = SolitonConfig::make({1}, {2});
    CHECK(eigenfunction_rule(one, 1).factors == std::vector<double>{0.0});
    const auto two = SolitonConfig::make({1, 2}, {1, 1});
    const auto r2 = eigenfunction_rule(two, 2).factors;
    CHECK(r2[0] == doctest::Approx(1.0 / 3.0));
    CHECK(r2[1] == 0.0);
    const auto three = SolitonConfig::make({1, 2, 3}, {1, 1, 1});
    const auto r3 = eigenfunction_rule(three, 1).factors;
    CHECK(r3[0] == 0.0);
    CHECK(r3[1] == doctest::Approx(-1.0 / 3.0));
    CHECK(r3[2] == doctest::Approx(-0.5));
    const auto sq = squared_rule(three, 1).factors;
    CHECK(sq[2] == doctest::Approx(0.25));
    const auto comp = (eigenfunction_rule(three, 1) * eigenfunction_rule(three, 1)).factors;
    for (int i = 0; i < 3; ++i) CHECK(comp[i] == doctest::Approx(sq[i]));
    CHECK(pair_rule(three, 2, 2).factors == squared_rule(three, 2).factors);
    CHECK(drop_rule(three, 2).factors == std::vector<double>{1, 0, 1});
    CHECK(addition_rule(three, {{2, 3.0}}).factors[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(addition_rule(three, {{2, -1.0}}), ValidationError);
    CHECK_THROWS_AS(eigenfunction_rule(three, 4), UsageError);
    CHECK(deletion_rule(three, {1, 3}, 2).factors[1] == doctest::Approx(1.0 / 9.0 * 1.0 / 25.0));
}

TEST_CASE("time flows") {
    const auto cfg = SolitonConfig::make({1}, {2}, {{3, 0.1}});
    CHECK(apply_time_flows(cfg).c[0] == doctest::Approx(2.0 * std::exp(0.8)));
    CHECK(apply_time_flows(SolitonConfig::make({1}, {2}, {{5, 0.01}})).c[0] ==
          doctest::Approx(2.0 * std::exp(0.32)));
    CHECK(apply_time_flows(SolitonConfig::make({1, 2}, {2, 3}, {{3, 0.0}})).c == std::vector<double>{2, 3});
    CHECK_THROWS_AS(apply_time_flows(SolitonConfig::make({3}, {2}, {{3, 1e4}})), RangeError);
}

TEST_CASE("eigenfunctions") {
    const auto one = SolitonConfig::make({1}, {2});
    CHECK(eigenfunction(one, 1, 0.0, 0)[0] == doctest::Approx(0.5));
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        const SolitonConfig cfg = random_config(rng(), 1 + static_cast<int>(rng() % 5));
        const int n = cfg.size();
        const double far = 40.0 / cfg.k[0];
        for (int j = 1; j <= n; ++j) {
            const ScaledJet s = eigenfunction_scaled(cfg, j, far, 0);
            CHECK(s.jet[0] * std::exp(s.log_scale + cfg.k[static_cast<std::size_t>(j - 1)] * far) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
        for (double x : default_grid(cfg, 101)) CHECK(eigenfunction_scaled(cfg, n, x, 0).jet[0] > 0.0);
    }
}

TEST_CASE("analytic time derivative against finite differences") {
    CHECK(dt_potential(SolitonConfig{}, 0.3) == 0.0);
    const auto one = SolitonConfig::make({1}, {2});
    for (double x : {-1.0, 0.0, 0.8}) CHECK(std::abs(dt_potential(one, x) - dt_potential_fd(one, x)) < 1e-7);
    const SolitonConfig three = random_config(17, 3);
    for (double x : linspace(-3.0, 3.0, 7)) {
        const double an = dt_potential(three, x);
        CHECK(std::abs(an - dt_potential_fd(three, x, 1e-6)) < 1e-6 * std::max(1.0, std::abs(an)));
    }
}
