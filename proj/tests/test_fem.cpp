#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "saqpe/fem.hpp"

using namespace saqpe;

namespace {

Eigen::Matrix<double, 8, 3> unit_cube() {
    Eigen::Matrix<double, 8, 3> c;
    c << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0,
         0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1;
    return c;
}

// Two-mass spring chain (ground-k1-m1-k2-m2) as a hand-built FemModel.
FemModel two_dof_chain(double k1, double k2, double m1, double m2) {
    FemModel model;
    model.stiffness.resize(2, 2);
    model.stiffness.insert(0, 0) = k1 + k2;
    model.stiffness.insert(0, 1) = -k2;
    model.stiffness.insert(1, 0) = -k2;
    model.stiffness.insert(1, 1) = k2;
    model.stiffness.makeCompressed();
    model.mass_diagonal = Eigen::Vector2d(m1, m2);
    model.free_dof_count = 2;
    model.total_dof_count = 2;
    model.free_to_global = {0, 1};
    model.global_to_free = {0, 1};
    return model;
}

}  // namespace

TEST_CASE("hex8 element is symmetric with rigid-body equilibrium") {
    auto ke = hex8_stiffness(unit_cube(), 1.0, 0.0);
    CHECK((ke - ke.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // translating all nodes in one direction produces no force
    for (int dir = 0; dir < 3; ++dir) {
        Eigen::Matrix<double, 24, 1> translation = Eigen::Matrix<double, 24, 1>::Zero();
        for (int a = 0; a < 8; ++a) translation(3 * a + dir) = 1.0;
        CHECK((ke * translation).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("hex8 element has exactly six zero-energy modes") {
    auto ke = hex8_stiffness(unit_cube(), 1.0, 0.3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ke);
    auto eig = solver.eigenvalues();
    double scale = eig(23);
    int zero_modes = 0;
    for (int i = 0; i < 24; ++i) {
        if (std::fabs(eig(i)) < 1e-9 * scale) ++zero_modes;
        CHECK(eig(i) > -1e-9 * scale);  // positive semidefinite
    }
    CHECK(zero_modes == 6);
}

TEST_CASE("degenerate element is rejected") {
    auto c = unit_cube();
    c.row(6) = c.row(0);  // collapse a corner clear through the element
    CHECK_THROWS_AS(hex8_stiffness(c, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("paper mesh bookkeeping") {
    BeamConfig cfg;  // 16 x 6 x 2 defaults
    CHECK(cfg.total_dof_count() == 1071);
    FemModel model = build_cantilever(cfg);
    CHECK(model.free_dof_count == 1008);
    // lumping preserves the total mass: rho * volume
    double expected = 7.85e-9 * 1000.0 * 200.0 * 100.0;
    CHECK(model.full_mass_diagonal.sum() / 3.0 ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(model.mass_diagonal.sum() < model.full_mass_diagonal.sum());
}

TEST_CASE("smallest meshes count out correctly") {
    BeamConfig tiny;
    tiny.nx = tiny.ny = tiny.nz = 1;
    FemModel model = build_cantilever(tiny);
    CHECK(model.free_dof_count == 12);  // 8 nodes, 4 fixed
    CHECK(build_cantilever(BeamConfig::desk()).free_dof_count == 72);
}

TEST_CASE("standardize matches the two-mass closed form") {
    // K = [[5,-2],[-2,2]], M = diag(2,1): lambda from the characteristic
    // quadratic m1*m2*x^2 - (m2*(k1+k2) + m1*k2)*x + k1*k2 = 0
    FemModel chain = two_dof_chain(3.0, 2.0, 2.0, 1.0);
    double tr = 4.5, det = 3.0;
    double disc = std::sqrt(tr * tr - 4.0 * det);
    double big = (tr + disc) / 2.0, small = (tr - disc) / 2.0;

    StandardProblem problem = standardize(chain);
    REQUIRE(problem.m0 == 2);
    CHECK(problem.alpha == doctest::Approx(big / 0.9).epsilon(1e-12));
    CHECK(problem.eigenvalues[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(problem.eigenvalues[1] ==
          doctest::Approx(0.9 * small / big).epsilon(1e-12));
    CHECK(problem.eigenvalues[1] == doctest::Approx(0.19871010679341536).epsilon(1e-12));
    CHECK(problem.padded_dimension == 2);

    // unscaled eigenvalues reproduce through alpha
    CHECK(problem.alpha * problem.eigenvalues[1] == doctest::Approx(small).epsilon(1e-10));
    CHECK(problem.frequency_hz(1) ==
          doctest::Approx(std::sqrt(small) / (2.0 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("standardized eigensystem is orthonormal with small residuals") {
    FemModel model = build_cantilever(BeamConfig::desk());
    StandardProblem problem = standardize(model);
    REQUIRE(problem.m0 == 72);

    const auto& v = problem.eigenvectors;
    Eigen::MatrixXd gram = v.transpose() * v;
    gram -= Eigen::MatrixXd::Identity(72, 72);
    CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);

    // rebuild A and check residuals mode by mode
    Eigen::VectorXd inv_sqrt_m = model.mass_diagonal.array().sqrt().inverse().matrix();
    Eigen::MatrixXd a = Eigen::MatrixXd(model.stiffness);
    a = inv_sqrt_m.asDiagonal() * a * inv_sqrt_m.asDiagonal();
    a /= problem.alpha;
    double lam_max = problem.eigenvalues.front();
    for (std::size_t k = 0; k < problem.m0; ++k) {
        Eigen::VectorXd residual =
            a * v.col(static_cast<Eigen::Index>(k)) -
            problem.eigenvalues[k] * v.col(static_cast<Eigen::Index>(k));
        CHECK(residual.norm() <= 1e-8 * lam_max);
    }

    CHECK(problem.eigenvalues.front() == 0.9);
    CHECK(problem.eigenvalues.back() > 0.0);
    CHECK(problem.padded_dimension == 128);
    CHECK(problem.spectrum.count() == 72);

    // overlap weights: squared rows of an orthogonal matrix sum to one
    auto w = problem.overlap_weights(5);
    double sum = 0.0;
    for (double x : w) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(problem.overlap_weights(72), std::out_of_range);
}

TEST_CASE("desk model fundamental frequency is in the plausible band") {
    StandardProblem problem = standardize(build_cantilever(BeamConfig::desk()));
    double f1 = problem.frequency_hz(problem.m0 - 1);
    // Euler-Bernoulli weak-axis estimate is ~82.5 Hz; the 4x2x1 mesh with full
    // integration locks considerably stiffer.
    CHECK(f1 > 80.0);
    CHECK(f1 < 260.0);
    // phases ascend and eigenvalues descend together
    for (std::size_t k = 1; k < problem.m0; ++k) {
        CHECK(problem.eigenvalues[k] < problem.eigenvalues[k - 1]);
        CHECK(problem.spectrum.phase(k) > problem.spectrum.phase(k - 1));
    }
}
