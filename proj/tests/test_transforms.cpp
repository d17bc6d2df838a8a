#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "reflectionless/errors.hpp"
#include "reflectionless/identities.hpp"
#include "reflectionless/numerics.hpp"
#include "reflectionless/transforms.hpp"

using namespace refl;

namespace {

std::function<double(double)> potential_of(const SolitonConfig& cfg) {
    return [cfg](double x) { return potential(cfg, x); };
}

double max_dev(const std::function<double(double)>& a, const std::function<double(double)>& b,
               const std::vector<double>& grid) {
    double worst = 0.0;
    for (double x : grid) worst = std::max(worst, std::abs(a(x) - b(x)));
    return worst;
}

}  // namespace

TEST_CASE("ground-state Darboux") {
    const auto r = darboux_ground(SolitonConfig::make({1, 2}, {6, 12}));
    CHECK(r.after.k == std::vector<double>{1});
    CHECK(r.after.c[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(darboux_ground(SolitonConfig::make({1}, {5})).after.size() == 0);
    const auto r3 = darboux_ground(SolitonConfig::make({1, 2, 3}, {1, 1, 1}));
    CHECK(r3.after.c[0] == doctest::Approx(0.5));
    CHECK(r3.after.c[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(darboux_ground(SolitonConfig{}), UsageError);
}

TEST_CASE("Krein-Adler condition") {
    CHECK_FALSE(krein_adler_check(2, {1}));
    CHECK(krein_adler_check(2, {1, 2}));
    CHECK(krein_adler_check(4, {2, 3}));
    CHECK_FALSE(krein_adler_check(4, {2, 4}));
    CHECK(krein_adler_violation(4, {2, 4}) == 3);
}

TEST_CASE("Krein-Adler deletion") {
    const auto two = SolitonConfig::make({1, 2}, {6, 12});
    CHECK(krein_adler_delete(two, {2}).after.c[0] == doctest::Approx(2.0));
    CHECK(krein_adler_delete(two, {1, 2}).after.size() == 0);
    const auto r = krein_adler_delete(SolitonConfig::make({1, 2, 3}, {1, 1, 1}), {2, 3});
    CHECK(r.after.c[0] == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_WITH_AS(krein_adler_delete(two, {1}), doctest::Contains("m=2"), ValidationError);
    const auto unsafe = krein_adler_delete(two, {1}, true);
    CHECK(unsafe.singular);
    CHECK(unsafe.after.c[0] < 0.0);
    CHECK_THROWS_AS(krein_adler_delete(two, {3}), UsageError);
    CHECK_THROWS_AS(krein_adler_delete(two, {2, 2}), UsageError);
}

TEST_CASE("Abraham-Moses deletion and addition") {
    const auto two = SolitonConfig::make({1, 2}, {6, 12});
    CHECK(am_delete(two, {2}).after.c[0] == doctest::Approx(2.0 / 3.0));
    const auto d1 = am_delete(two, {1});
    CHECK(d1.after.k == std::vector<double>{2});
    CHECK(d1.after.c[0] == doctest::Approx(4.0 / 3.0));
    CHECK(am_delete(two, {1, 2}).after.size() == 0);

    CHECK(am_add(two, {{1, 1.0}}).after.c[0] == doctest::Approx(3.0));
    const auto a = am_add(two, {{1, 3.0}});
    CHECK(a.after.c[0] == doctest::Approx(4.5));
    CHECK(a.after.c[1] == 12.0);
    CHECK(a.after.k == two.k);
    CHECK(std::abs(am_add(two, {{2, 1e12}}).after.c[1] - 12.0) / 12.0 < 1e-11);
    CHECK_THROWS_AS(am_add(two, {{1, 0.0}}), ValidationError);
}

TEST_CASE("deletions commute and compose") {
    const SolitonConfig cfg = random_config(21, 5);
    const auto once = am_delete(cfg, {2, 4}).after;
    const auto first = am_delete(cfg, {2}).after;  // index 4 becomes 3
    const auto twice = am_delete(first, {3}).after;
    REQUIRE(once.size() == twice.size());
    for (int i = 0; i < once.size(); ++i)
        CHECK(std::abs(once.c[static_cast<std::size_t>(i)] - twice.c[static_cast<std::size_t>(i)]) <=
              1e-13 * once.c[static_cast<std::size_t>(i)]);
}

TEST_CASE("Wronskians of exponentials") {
    const double x = 0.4;
    const ScaledJet w1 = wronskian({exponential_seed(1.5)}, x, 1);
    CHECK(w1.expanded()[0] == doctest::Approx(std::exp(0.6)));
    const ScaledJet w2 = wronskian({exponential_seed(0.5), exponential_seed(2.0)}, x, 0);
    CHECK(w2.expanded()[0] == doctest::Approx(1.5 * std::exp(2.5 * x)));
    const ScaledJet w3 = wronskian({exponential_seed(1), exponential_seed(2), exponential_seed(3)}, 0.0, 0);
    CHECK(w3.expanded()[0] == doctest::Approx(2.0));
}

TEST_CASE("seed functions solve their equations") {
    const SolitonConfig cfg = random_config(8, 3);
    std::vector<SeedFunction> seeds{eigenfunction_seed(cfg, 1), normalized_eigenfunction_seed(cfg, 3)};
    for (const auto& s : seeds) {
        for (double x : {-2.0, 0.1, 1.7}) {
            const Jet f = s.evaluate(x, 2).expanded();
            const double res = -f.derivative(2) + potential(cfg, x) * f[0] - s.energy * f[0];
            CHECK(std::abs(res) < 1e-8 * std::max(1.0, std::abs(f.derivative(2))));
        }
    }
    for (const auto& s : {free_seed(1.2, -0.7), cosine_seed(0.9), sine_seed(0.9)}) {
        const Jet f = s.evaluate(0.3, 2).expanded();
        CHECK(std::abs(-f.derivative(2) - s.energy * f[0]) < 1e-12);
    }
}

TEST_CASE("generic Darboux") {
    const SolitonConfig cfg = random_config(9, 3);
    const SeedFunction phi1 = eigenfunction_seed(cfg, 1);
    const ScaledJet same = generic_darboux({}, phi1, 0.2, 1);
    CHECK(same.expanded()[0] == doctest::Approx(phi1.evaluate(0.2, 1).expanded()[0]));
    CHECK(std::abs(generic_darboux({phi1}, phi1, 0.2, 0).expanded()[0]) < 1e-14);
    CHECK_THROWS_AS(generic_darboux({phi1, phi1}, cosine_seed(1.0), 0.3, 0), SingularityError);
}

TEST_CASE("plane wave through free-seed Darboux picks up the transmission product") {
    const std::vector<double> k{0.8, 1.5, 2.1};
    const std::vector<double> ct{0.6, -1.3, 2.0};
    std::vector<SeedFunction> seeds;
    for (std::size_t j = 0; j < k.size(); ++j) seeds.push_back(free_seed(k[j], ct[j]));
    const double q = 1.1;
    auto amplitude = [&](double x) {
        const std::complex<double> psi(generic_darboux(seeds, cosine_seed(q), x, 0).expanded()[0],
                                       generic_darboux(seeds, sine_seed(q), x, 0).expanded()[0]);
        return psi * std::exp(std::complex<double>(0, -q * x));
    };
    const double far = 12.0 / k[0];
    const std::complex<double> ratio = amplitude(far) / amplitude(-far);
    CHECK(std::abs(ratio - reflectionless_transmission(k, q)) < 1e-6);
    // matched soliton config has the same potential
    const SolitonConfig matched = seed_to_soliton(k, ct);
    for (double x : {-3.0, 0.0, 2.0})
        CHECK(darboux_potential([](double) { return 0.0; }, seeds, x) == doctest::Approx(potential(matched, x)).epsilon(1e-9));
}

TEST_CASE("closure: generic engines reproduce the closed-form rewrites") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        const SolitonConfig cfg = random_config(rng(), 4);
        const auto grid = linspace(-6.0 / cfg.k[0], 6.0 / cfg.k[0], 61);
        const auto base = potential_of(cfg);

        const std::vector<int> d{2, 3};
        std::vector<SeedFunction> seeds;
        for (int j : d) seeds.push_back(eigenfunction_seed(cfg, j));
        const auto ka = krein_adler_delete(cfg, d).after;
        CHECK(max_dev([&](double x) { return darboux_potential(base, seeds, x); }, potential_of(ka), grid) < 1e-9);

        const std::vector<int> any{1, 3};
        const auto am = am_delete(cfg, any).after;
        const auto tails = soliton_tails(cfg, any, false);
        std::vector<SeedFunction> s2;
        for (int j : any) s2.push_back(eigenfunction_seed(cfg, j));
        CHECK(max_dev([&](double x) { return generic_am_deletion(base, s2, tails, x).potential; }, potential_of(am),
                      grid) < 1e-9);
        // the subtracted form agrees where the tails are not yet tiny
        const auto norms = soliton_norms(cfg, any, false);
        const auto overlaps = soliton_overlaps(cfg, any, false);
        CHECK(max_dev([&](double x) { return generic_am(base, s2, AmMode::remove, norms, overlaps, x).potential; },
                      potential_of(am), linspace(-6.0 / cfg.k[0], 0.0, 13)) < 1e-6);

        const std::map<int, double> e{{2, 0.7}, {4, 3.0}};
        const auto added = am_add(cfg, e).after;
        const std::vector<int> idx{2, 4};
        std::vector<SeedFunction> s3{normalized_eigenfunction_seed(cfg, 2), normalized_eigenfunction_seed(cfg, 4)};
        CHECK(max_dev([&](double x) {
                  return generic_am(base, s3, AmMode::add, {0.7, 3.0}, soliton_overlaps(cfg, idx, true), x).potential;
              },
                      potential_of(added), grid) < 1e-9);
    }
}

TEST_CASE("Abraham-Moses step equals two chained Darboux steps") {
    const SolitonConfig cfg = random_config(31, 3);
    const double e = 0.8;
    const int j = 2;
    const auto base = potential_of(cfg);
    const SeedFunction phi = normalized_eigenfunction_seed(cfg, j);
    const OverlapJet ov = soliton_overlaps(cfg, {j}, true);
    // second seed (e + <phi, phi>) / phi solves the once-transformed equation
    const SeedFunction chi{[&](double x, int order) {
                               const Jet f = ov(0, 0, x, order) + e;
                               const ScaledJet p = phi.evaluate(x, order);
                               return ScaledJet{f, 0.0} / p;
                           },
                           phi.energy, "chi"};
    for (double x : linspace(-4.0, 4.0, 9)) {
        const auto once = [&](double y) { return darboux_potential(base, {phi}, y); };
        const double chained = darboux_potential(once, {chi}, x);
        const double am = generic_am(base, {phi}, AmMode::add, {e}, ov, x).potential;
        CHECK(std::abs(chained - am) < 1e-8);
    }
}

TEST_CASE("generic AM transforms a target and rejects indefinite F") {
    const SolitonConfig cfg = random_config(41, 3);
    const std::vector<int> idx{1};
    const auto base = potential_of(cfg);
    const SeedFunction phi = eigenfunction_seed(cfg, 1);
    const SeedFunction target = eigenfunction_seed(cfg, 3);
    const OverlapJet ov = soliton_tails(cfg, idx, false);
    const TargetOverlapJet tov = [&](std::size_t, double x, int order) {
        return inner_tail_jet(cfg, 1, 3, x, order).expanded() * -1.0;
    };
    const auto norms = soliton_norms(cfg, idx, false);
    const auto after = am_delete(cfg, idx).after;
    for (double x : {-1.5, 0.0, 1.0}) {
        const GenericAmResult r = generic_am_deletion(base, {phi}, ov, x, 2, &target, tov);
        REQUIRE(r.target.has_value());
        const Jet& psi = *r.target;
        const double res = -psi.derivative(2) + potential(after, x) * psi[0] - target.energy * psi[0];
        CHECK(std::abs(res) < 1e-8);
    }
    const OverlapJet full = soliton_overlaps(cfg, idx, false);
    CHECK_THROWS_AS(generic_am(base, {phi}, AmMode::remove, {0.5 * norms[0]}, full, 5.0), SingularityError);
}

TEST_CASE("overlaps by quadrature agree with closed form") {
    const SolitonConfig cfg = random_config(2, 2);
    const std::vector<SeedFunction> seeds{eigenfunction_seed(cfg, 1), eigenfunction_seed(cfg, 2)};
    const double lower = -40.0 / cfg.k[0];
    const OverlapJet q = quadrature_overlaps(seeds, lower, 1e-12);
    const OverlapJet c = soliton_overlaps(cfg, {1, 2}, false);
    for (double x : {-1.0, 0.5}) {
        const Jet a = q(0, 1, x, 1), b = c(0, 1, x, 1);
        CHECK(std::abs(a[0] - b[0]) < 1e-8);
        CHECK(std::abs(a[1] - b[1]) < 1e-10);
    }
}
