#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "saqpe/spectrum.hpp"

namespace saqpe {

/// Cantilever beam model in the consistent tonne-mm-s-MPa unit system,
/// so that K v = lambda M v yields lambda in (rad/s)^2.
struct BeamConfig {
    double length_mm = 1000.0;
    double width_mm = 200.0;
    double height_mm = 100.0;
    int nx = 16;
    int ny = 6;
    int nz = 2;
    double youngs_mpa = 205000.0;
    double poisson = 0.3;
    double density_tonne_mm3 = 7.85e-9;

    void validate() const;
    std::size_t node_count() const;
    std::size_t total_dof_count() const;

    /// Small model for fast end-to-end runs: 4 x 2 x 1 mesh, 72 free DOFs.
    static BeamConfig desk();
};

/// Element stiffness of a trilinear 8-node hexahedron, isotropic elasticity,
/// full 2x2x2 Gauss quadrature. Rows/cols are node-major (x,y,z per node).
/// Throws if the Jacobian is not positive at every Gauss point.
Eigen::Matrix<double, 24, 24> hex8_stiffness(
    const Eigen::Matrix<double, 8, 3>& node_coords, double youngs, double poisson);

/// Consistent element mass for the same element (used row-summed for lumping).
Eigen::Matrix<double, 24, 24> hex8_consistent_mass(
    const Eigen::Matrix<double, 8, 3>& node_coords, double density);

/// Assembled free-DOF system after eliminating the fixed face at x = 0.
/// DOF ordering is node-major with nodes in lexicographic (x, y, z) order.
struct FemModel {
    Eigen::SparseMatrix<double> stiffness;  // m0 x m0, symmetric positive definite
    Eigen::VectorXd mass_diagonal;          // m0, positive (tonne)
    Eigen::VectorXd full_mass_diagonal;     // all DOFs, before elimination
    std::size_t free_dof_count = 0;         // m0
    std::size_t total_dof_count = 0;
    std::vector<std::int64_t> free_to_global;   // free index -> global DOF
    std::vector<std::int64_t> global_to_free;   // global DOF -> free index or -1
};

FemModel build_cantilever(const BeamConfig& config);

/// Scaled standard eigenproblem A/alpha with A = M^{-1/2} K M^{-1/2}.
/// Eigenvalues are sorted descending (phases ascending); column k of
/// `eigenvectors` belongs to eigenvalue k and phase k of `spectrum`.
struct StandardProblem {
    std::vector<double> eigenvalues;  // scaled into (0, target_norm]
    double alpha = 0.0;               // scaling factor, units (rad/s)^2
    Eigen::MatrixXd eigenvectors;     // m0 x m0, orthonormal columns
    Spectrum spectrum;                // theta_k = 2*acos(lambda_k)/pi, ascending
    std::size_t m0 = 0;
    std::size_t padded_dimension = 0;  // 2^m >= m0 (bookkeeping only)
    std::vector<std::size_t> clamped_modes;  // eigenvalues clamped at the phase map edge

    /// Squared overlaps |<j0|psi_k>|^2 for a computational basis state j0.
    std::vector<double> overlap_weights(std::size_t j0) const;

    /// Natural frequency of mode k in Hz: sqrt(alpha*lambda_k)/(2pi).
    double frequency_hz(std::size_t k) const;
};

/// Dense symmetric eigendecomposition of the standardized operator, scaled
/// by alpha = lambda_max / target_norm. target_norm must lie in (0, 1).
StandardProblem standardize(const FemModel& model, double target_norm = 0.9,
                            bool pad_to_power_of_two = true);

/// Coordinate-format ("row col value", 1-based, upper triangle) stiffness dump.
void write_stiffness_coordinate(const FemModel& model, std::ostream& out);
void write_mass_diagonal(const FemModel& model, std::ostream& out);

/// Model manifest: config, m0, alpha, eigenvalue range (JSON text).
std::string model_manifest_json(const BeamConfig& config, const FemModel& model,
                                const StandardProblem& problem);

}  // namespace saqpe
