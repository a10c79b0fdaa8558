#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <numbers>

#include <Eigen/Dense>

#include "saqpe/detection.hpp"
#include "saqpe/fejer.hpp"
#include "saqpe/qpe_dist.hpp"

using namespace saqpe;

namespace {

// A StandardProblem with a prescribed orthonormal eigenbasis, for
// distribution-level tests that do not need a real FEM model.
StandardProblem toy_problem(const Eigen::MatrixXd& eigenvectors,
                            std::vector<double> scaled_eigenvalues) {
    auto mapping = phases_from_eigenvalues(scaled_eigenvalues);
    StandardProblem problem{.eigenvalues = std::move(scaled_eigenvalues),
                            .alpha = 1.0,
                            .eigenvectors = eigenvectors,
                            .spectrum = std::move(mapping.spectrum),
                            .m0 = static_cast<std::size_t>(eigenvectors.rows()),
                            .padded_dimension = 0,
                            .clamped_modes = {}};
    return problem;
}

Eigen::MatrixXd random_orthonormal(int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

}  // namespace

TEST_CASE("mode weights validation") {
    CHECK_THROWS_AS(ModeWeights({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(ModeWeights({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(ModeWeights(std::vector<double>{}), std::invalid_argument);
    auto u = ModeWeights::uniform(4);
    CHECK(u[0] == 0.25);
}

TEST_CASE("on-grid phase gives a point mass") {
    PhaseGrid g(3);
    auto dist = exact_weighted(Spectrum::from_values({5.0 / 8.0}),
                               ModeWeights::uniform(1), g);
    for (std::uint64_t j = 0; j < 8; ++j) {
        if (j == 5) {
            CHECK(dist.prob(j) == doctest::Approx(1.0).epsilon(1e-15));
        } else {
            CHECK(dist.prob(j) <= 1e-25);
        }
    }
}

TEST_CASE("single off-grid phase is the normalized kernel and sums to one") {
    PhaseGrid g(3);
    auto dist = exact_weighted(Spectrum::from_values({0.1}), ModeWeights::uniform(1), g);
    double sum = 0.0;
    for (double p : dist.dense()) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distribution is linear in the weights") {
    PhaseGrid g(5);
    auto s = Spectrum::from_values({0.13, 0.61});
    auto mixed = exact_weighted(s, ModeWeights({0.3, 0.7}), g);
    auto first = exact_weighted(Spectrum::from_values({0.13}), ModeWeights::uniform(1), g);
    auto second = exact_weighted(Spectrum::from_values({0.61}), ModeWeights::uniform(1), g);
    for (std::uint64_t j = 0; j < g.size(); ++j) {
        CHECK(mixed.prob(j) ==
              doctest::Approx(0.3 * first.prob(j) + 0.7 * second.prob(j)).epsilon(1e-14));
    }
}

TEST_CASE("state averaged equals uniform weights") {
    PhaseGrid g(4);
    SUBCASE("two on-grid phases") {
        auto dist = state_averaged(Spectrum::from_values({0.25, 0.75}), PhaseGrid(3));
        CHECK(dist.prob(2) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(dist.prob(6) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(dist.prob(0) <= 1e-25);
    }
    SUBCASE("three random phases, bin-wise identity") {
        auto s = Spectrum::from_values({0.111, 0.444, 0.812});
        auto avg = state_averaged(s, g);
        auto explicit_uniform = exact_weighted(s, ModeWeights::uniform(3), g);
        for (std::uint64_t j = 0; j < g.size(); ++j) {
            CHECK(avg.prob(j) == explicit_uniform.prob(j));  // same code path
        }
    }
}

TEST_CASE("both evaluation modes match the definitional sum") {
    auto s = Spectrum::from_values({0.1234567, 0.7654321});
    auto formula = [&](const PhaseGrid& g, std::uint64_t j) {
        double a = static_cast<double>(j) / static_cast<double>(g.size());
        double p = 0.0;
        for (std::size_t k = 0; k < s.count(); ++k) {
            p += 0.5 * fejer_normalized(g.size(),
                                        2.0 * std::numbers::pi * (s.phase(k) - a));
        }
        return p;
    };

    PhaseGrid dense_grid(10);
    auto dense = state_averaged(s, dense_grid);
    CHECK(dense.is_dense());
    for (std::uint64_t j = 0; j < dense_grid.size(); ++j) {
        CHECK(std::fabs(dense.prob(j) - formula(dense_grid, j)) < 1e-15);
    }

    PhaseGrid lazy_grid(23);  // beyond the dense limit
    auto lazy = state_averaged(s, lazy_grid);
    CHECK(!lazy.is_dense());
    CHECK_THROWS_AS(lazy.dense(), std::logic_error);
    for (std::uint64_t j = 12345; j < lazy_grid.size(); j += lazy_grid.size() / 53) {
        CHECK(std::fabs(lazy.prob(j) - formula(lazy_grid, j)) < 1e-15);
    }
}

TEST_CASE("conditional on a basis state") {
    SUBCASE("diagonal eigenbasis reduces to a single mode") {
        Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(3, 3);
        auto problem = toy_problem(identity, {0.9, 0.5, 0.2});
        PhaseGrid g(6);
        auto conditional = conditional_on_basis(problem, 1, g);
        auto single = exact_weighted(Spectrum::from_values(
                                         {problem.spectrum.phase(1)}),
                                     ModeWeights::uniform(1), g);
        for (std::uint64_t j = 0; j < g.size(); ++j) {
            CHECK(conditional.prob(j) == doctest::Approx(single.prob(j)).epsilon(1e-14));
        }
    }
    SUBCASE("out of range basis index") {
        auto problem = toy_problem(Eigen::MatrixXd::Identity(3, 3), {0.9, 0.5, 0.2});
        CHECK_THROWS_AS(conditional_on_basis(problem, 3, PhaseGrid(6)),
                        std::out_of_range);
    }
}

TEST_CASE("uniform mixture of conditionals is the state-averaged law") {
    auto v = random_orthonormal(6, 99);
    auto problem = toy_problem(v, {0.9, 0.81, 0.64, 0.5, 0.3, 0.17});
    PhaseGrid g(7);
    auto averaged = state_averaged(problem.spectrum, g);
    std::vector<double> mixture(g.size(), 0.0);
    for (std::size_t j0 = 0; j0 < problem.m0; ++j0) {
        auto conditional = conditional_on_basis(problem, j0, g);
        for (std::uint64_t j = 0; j < g.size(); ++j) {
            mixture[j] += conditional.prob(j) / static_cast<double>(problem.m0);
        }
    }
    for (std::uint64_t j = 0; j < g.size(); ++j) {
        CHECK(mixture[j] == doctest::Approx(averaged.prob(j)).epsilon(1e-12));
    }
}

TEST_CASE("one-design equalization over computational basis states") {
    for (int dim : {4, 16, 64}) {
        auto v = random_orthonormal(dim, 1000 + static_cast<unsigned>(dim));
        for (int k = 0; k < dim; ++k) {
            double mean = 0.0;
            for (int j = 0; j < dim; ++j) {
                mean += v(j, k) * v(j, k);
            }
            mean /= static_cast<double>(dim);
            CHECK(std::fabs(mean - 1.0 / dim) < 1e-14);
        }
    }
}

TEST_CASE("state-averaged bins respect the peak-height ceiling") {
    PhaseGrid g(8);
    for (std::uint64_t seed : {3ull, 14ull, 159ull}) {
        auto s = synthetic_spectrum(12, g, 3.0, seed);
        auto dist = state_averaged(s, g);
        auto constants = detection_constants(g);
        double ceiling = constants.gamma / 12.0 + constants.d_n;
        for (double p : dist.dense()) {
            CHECK(p <= ceiling + 1e-14);
        }
    }
}

TEST_CASE("csv export covers the grid") {
    auto dist = state_averaged(Spectrum::from_values({0.3}), PhaseGrid(3));
    std::ostringstream out;
    dist.write_csv(out);
    auto text = out.str();
    CHECK(text.rfind("j,a_j,p_j\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);  // header + 8 bins
}
