#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "saqpe/spectrum.hpp"

using namespace saqpe;

TEST_CASE("spectrum validation") {
    CHECK_THROWS_AS(Spectrum::from_sorted({}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_sorted({0.2, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_sorted({0.2, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_sorted({0.2, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_values({1e-18, 1.0 - 1e-17}), std::invalid_argument);
    auto s = Spectrum::from_values({0.9, 0.1, 0.5});
    CHECK(s.phases() == std::vector<double>{0.1, 0.5, 0.9});
}

TEST_CASE("min gap over cyclic pairs") {
    auto report = min_gap(Spectrum::from_values({0.1, 0.5, 0.9}));
    CHECK(report.min_gap == doctest::Approx(0.2).epsilon(1e-15));

    auto antipodal = min_gap(Spectrum::from_values({0.0, 0.5}));
    CHECK(antipodal.min_gap == 0.5);
    CHECK(antipodal.min_ancilla_bits == 3);  // 3/8 < 0.5, 3/4 not
    CHECK(antipodal.min_grid_size == 8);

    CHECK_THROWS_AS(min_gap(Spectrum::from_values({0.25})), std::invalid_argument);
}

TEST_CASE("min gap picks the paper-style grid rule") {
    // gap slightly above 3/2^20 requires exactly n = 20
    double gap = 3.0 / 1048576.0 * 1.01;
    auto report = min_gap(Spectrum::from_values({0.1, 0.1 + gap, 0.9}));
    CHECK(report.min_ancilla_bits == 20);
    PhaseGrid grid(20);
    CHECK(report.satisfies_3_over_n(grid));
    CHECK(!report.satisfies_3_over_n(PhaseGrid(19)));
}

TEST_CASE("phase map from eigenvalues") {
    SUBCASE("arccos inverts cos") {
        auto mapping = phases_from_eigenvalues({std::cos(std::numbers::pi / 8.0)});
        CHECK(mapping.spectrum.phase(0) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(mapping.clamped_indices.empty());
    }
    SUBCASE("frozen values") {
        auto mapping = phases_from_eigenvalues({0.9, 0.5, 0.1});
        CHECK(mapping.spectrum.phase(0) == doctest::Approx(0.287132586257412542).epsilon(1e-15));
        CHECK(mapping.spectrum.phase(1) == doctest::Approx(0.666666666666666667).epsilon(1e-15));
        CHECK(mapping.spectrum.phase(2) == doctest::Approx(0.936231439141480152).epsilon(1e-15));
    }
    SUBCASE("domain edge clamps with a flag") {
        auto mapping = phases_from_eigenvalues({1.0 - 1e-16, 0.5});  // rounds to 1.0
        CHECK(mapping.clamped_indices == std::vector<std::size_t>{0});
        CHECK(mapping.spectrum.phase(0) > 0.0);
    }
    SUBCASE("grossly out of range throws") {
        CHECK_THROWS_AS(phases_from_eigenvalues({1.5}), std::invalid_argument);
        CHECK_THROWS_AS(phases_from_eigenvalues({-0.2}), std::invalid_argument);
    }
    SUBCASE("duplicates are a hard error") {
        CHECK_THROWS_AS(phases_from_eigenvalues({0.5, 0.5}), std::invalid_argument);
    }
}

TEST_CASE("phase map is strictly decreasing in lambda and round-trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
    std::vector<double> lams;
    for (int i = 0; i < 64; ++i) lams.push_back(unif(rng));
    auto mapping = phases_from_eigenvalues(lams);
    std::sort(lams.begin(), lams.end(), std::greater<>());
    for (std::size_t k = 0; k < lams.size(); ++k) {
        if (k > 0) CHECK(mapping.spectrum.phase(k) > mapping.spectrum.phase(k - 1));
        CHECK(eigenvalue_from_phase(mapping.spectrum.phase(k)) ==
              doctest::Approx(lams[k]).epsilon(1e-12));
    }
}

TEST_CASE("synthetic spectra satisfy the separation floor") {
    PhaseGrid g(6);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 42ull}) {
        auto s = synthetic_spectrum(4, g, 3.0, seed);
        CHECK(s.count() == 4);
        CHECK(min_gap(s).min_gap >= 3.0 / 64.0 - 1e-15);
    }
    // boundary N = 4r allowed
    auto tight = synthetic_spectrum(16, g, 3.0, 7);
    CHECK(tight.count() == 16);
    CHECK(min_gap(tight).min_gap >= 3.0 / 64.0 - 1e-15);
    // N >= 4r violated
    CHECK_THROWS_AS(synthetic_spectrum(17, g, 3.0, 7), std::invalid_argument);
    // single phase is fine on any admissible grid
    auto single = synthetic_spectrum(1, PhaseGrid(3), 3.0, 11);
    CHECK(single.count() == 1);
}

TEST_CASE("synthetic spectra are deterministic per seed") {
    PhaseGrid g(8);
    auto a = synthetic_spectrum(8, g, 3.0, 123);
    auto b = synthetic_spectrum(8, g, 3.0, 123);
    auto c = synthetic_spectrum(8, g, 3.0, 124);
    CHECK(a.phases() == b.phases());
    CHECK(a.phases() != c.phases());
}

TEST_CASE("json round trip preserves every bit") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> phases;
    for (int i = 0; i < 40; ++i) phases.push_back(unif(rng));
    auto s = Spectrum::from_values(phases);
    auto back = Spectrum::from_json(s.to_json());
    REQUIRE(back.count() == s.count());
    for (std::size_t k = 0; k < s.count(); ++k) {
        CHECK(back.phase(k) == s.phase(k));  // exact: 17 significant digits
    }
}
