#include "saqpe/fem.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace saqpe {

namespace {

constexpr double kGauss = 0.5773502691896257;  // 1/sqrt(3)

// Corner signs of the reference hexahedron, standard node ordering.
constexpr int kSigns[8][3] = {
    {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
    {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},
};

// dN_a/dxi at a natural-coordinate point, rows = nodes.
Eigen::Matrix<double, 8, 3> shape_gradients(double xi, double eta, double zeta) {
    Eigen::Matrix<double, 8, 3> dn;
    for (int a = 0; a < 8; ++a) {
        double sx = kSigns[a][0], sy = kSigns[a][1], sz = kSigns[a][2];
        dn(a, 0) = sx * (1 + sy * eta) * (1 + sz * zeta) / 8.0;
        dn(a, 1) = (1 + sx * xi) * sy * (1 + sz * zeta) / 8.0;
        dn(a, 2) = (1 + sx * xi) * (1 + sy * eta) * sz / 8.0;
    }
    return dn;
}

Eigen::Matrix<double, 8, 1> shape_values(double xi, double eta, double zeta) {
    Eigen::Matrix<double, 8, 1> n;
    for (int a = 0; a < 8; ++a) {
        n(a) = (1 + kSigns[a][0] * xi) * (1 + kSigns[a][1] * eta) *
               (1 + kSigns[a][2] * zeta) / 8.0;
    }
    return n;
}

Eigen::Matrix<double, 6, 6> elasticity_matrix(double youngs, double poisson) {
    double lame = youngs * poisson / ((1 + poisson) * (1 - 2 * poisson));
    double shear = youngs / (2 * (1 + poisson));
    Eigen::Matrix<double, 6, 6> d = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) d(i, j) = lame;
        d(i, i) = lame + 2 * shear;
        d(i + 3, i + 3) = shear;
    }
    return d;
}

}  // namespace

void BeamConfig::validate() const {
    if (length_mm <= 0 || width_mm <= 0 || height_mm <= 0) {
        throw std::invalid_argument("BeamConfig: dimensions must be positive");
    }
    if (nx < 1 || ny < 1 || nz < 1) {
        throw std::invalid_argument("BeamConfig: element counts must be positive");
    }
    if (youngs_mpa <= 0 || density_tonne_mm3 <= 0) {
        throw std::invalid_argument("BeamConfig: E and rho must be positive");
    }
    if (poisson < 0 || poisson >= 0.5) {
        throw std::invalid_argument("BeamConfig: poisson must be in [0, 0.5)");
    }
}

std::size_t BeamConfig::node_count() const {
    return static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1);
}

std::size_t BeamConfig::total_dof_count() const { return 3 * node_count(); }

BeamConfig BeamConfig::desk() {
    BeamConfig cfg;
    cfg.nx = 4;
    cfg.ny = 2;
    cfg.nz = 1;
    return cfg;
}

Eigen::Matrix<double, 24, 24> hex8_stiffness(
    const Eigen::Matrix<double, 8, 3>& node_coords, double youngs, double poisson) {
    Eigen::Matrix<double, 6, 6> d = elasticity_matrix(youngs, poisson);
    Eigen::Matrix<double, 24, 24> ke = Eigen::Matrix<double, 24, 24>::Zero();
    for (int gx : {-1, 1}) {
        for (int gy : {-1, 1}) {
            for (int gz : {-1, 1}) {
                auto dn = shape_gradients(gx * kGauss, gy * kGauss, gz * kGauss);
                Eigen::Matrix3d jac = dn.transpose() * node_coords;
                double det = jac.determinant();
                if (!(det > 0.0)) {
                    throw std::invalid_argument(
                        "hex8_stiffness: non-positive Jacobian (degenerate element)");
                }
                // dN/dx = dN/dxi * J^{-1} (gradients w.r.t. physical coords)
                Eigen::Matrix<double, 8, 3> dnx = dn * jac.inverse();
                Eigen::Matrix<double, 6, 24> b = Eigen::Matrix<double, 6, 24>::Zero();
                for (int a = 0; a < 8; ++a) {
                    double bx = dnx(a, 0), by = dnx(a, 1), bz = dnx(a, 2);
                    int c = 3 * a;
                    b(0, c) = bx;
                    b(1, c + 1) = by;
                    b(2, c + 2) = bz;
                    b(3, c) = by;
                    b(3, c + 1) = bx;
                    b(4, c + 1) = bz;
                    b(4, c + 2) = by;
                    b(5, c) = bz;
                    b(5, c + 2) = bx;
                }
                ke += b.transpose() * d * b * det;
            }
        }
    }
    return ke;
}

Eigen::Matrix<double, 24, 24> hex8_consistent_mass(
    const Eigen::Matrix<double, 8, 3>& node_coords, double density) {
    Eigen::Matrix<double, 24, 24> me = Eigen::Matrix<double, 24, 24>::Zero();
    for (int gx : {-1, 1}) {
        for (int gy : {-1, 1}) {
            for (int gz : {-1, 1}) {
                auto dn = shape_gradients(gx * kGauss, gy * kGauss, gz * kGauss);
                Eigen::Matrix3d jac = dn.transpose() * node_coords;
                double det = jac.determinant();
                auto n = shape_values(gx * kGauss, gy * kGauss, gz * kGauss);
                for (int a = 0; a < 8; ++a) {
                    for (int b2 = 0; b2 < 8; ++b2) {
                        double m = density * n(a) * n(b2) * det;
                        for (int dir = 0; dir < 3; ++dir) {
                            me(3 * a + dir, 3 * b2 + dir) += m;
                        }
                    }
                }
            }
        }
    }
    return me;
}

FemModel build_cantilever(const BeamConfig& config) {
    config.validate();
    const int nny = config.ny + 1, nnz = config.nz + 1;
    auto node_id = [&](int ix, int iy, int iz) -> std::int64_t {
        return static_cast<std::int64_t>(ix) * nny * nnz +
               static_cast<std::int64_t>(iy) * nnz + iz;
    };
    const double dx = config.length_mm / config.nx;
    const double dy = config.width_mm / config.ny;
    const double dz = config.height_mm / config.nz;

    // Uniform mesh: a single element stiffness / lumped-mass template.
    Eigen::Matrix<double, 8, 3> coords;
    for (int a = 0; a < 8; ++a) {
        coords(a, 0) = (kSigns[a][0] + 1) / 2.0 * dx;
        coords(a, 1) = (kSigns[a][1] + 1) / 2.0 * dy;
        coords(a, 2) = (kSigns[a][2] + 1) / 2.0 * dz;
    }
    Eigen::Matrix<double, 24, 24> ke =
        hex8_stiffness(coords, config.youngs_mpa, config.poisson);
    Eigen::Matrix<double, 24, 24> me =
        hex8_consistent_mass(coords, config.density_tonne_mm3);
    Eigen::Matrix<double, 24, 1> me_lumped = me.rowwise().sum();

    const std::size_t ndof = config.total_dof_count();
    std::vector<std::int64_t> global_to_free(ndof, 0);
    for (int iy = 0; iy < nny; ++iy) {
        for (int iz = 0; iz < nnz; ++iz) {
            std::int64_t n = node_id(0, iy, iz);
            for (int dir = 0; dir < 3; ++dir) global_to_free[3 * n + dir] = -1;
        }
    }
    std::vector<std::int64_t> free_to_global;
    free_to_global.reserve(ndof);
    for (std::size_t g = 0; g < ndof; ++g) {
        if (global_to_free[g] == 0) {
            global_to_free[g] = static_cast<std::int64_t>(free_to_global.size());
            free_to_global.push_back(static_cast<std::int64_t>(g));
        }
    }
    const std::size_t m0 = free_to_global.size();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(config.nx) * config.ny * config.nz * 24 * 24);
    Eigen::VectorXd full_mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ndof));

    for (int ex = 0; ex < config.nx; ++ex) {
        for (int ey = 0; ey < config.ny; ++ey) {
            for (int ez = 0; ez < config.nz; ++ez) {
                std::int64_t nodes[8];
                for (int a = 0; a < 8; ++a) {
                    nodes[a] = node_id(ex + (kSigns[a][0] + 1) / 2,
                                       ey + (kSigns[a][1] + 1) / 2,
                                       ez + (kSigns[a][2] + 1) / 2);
                }
                std::int64_t dofs[24];
                for (int a = 0; a < 8; ++a) {
                    for (int dir = 0; dir < 3; ++dir) {
                        full_mass(3 * nodes[a] + dir) += me_lumped(3 * a + dir);
                        dofs[3 * a + dir] = global_to_free[3 * nodes[a] + dir];
                    }
                }
                for (int i = 0; i < 24; ++i) {
                    if (dofs[i] < 0) continue;
                    for (int j = 0; j < 24; ++j) {
                        if (dofs[j] < 0) continue;
                        triplets.emplace_back(static_cast<int>(dofs[i]),
                                              static_cast<int>(dofs[j]), ke(i, j));
                    }
                }
            }
        }
    }

    FemModel model;
    model.stiffness.resize(static_cast<Eigen::Index>(m0), static_cast<Eigen::Index>(m0));
    model.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    model.mass_diagonal.resize(static_cast<Eigen::Index>(m0));
    for (std::size_t f = 0; f < m0; ++f) {
        model.mass_diagonal(static_cast<Eigen::Index>(f)) =
            full_mass(free_to_global[f]);
    }
    model.full_mass_diagonal = full_mass;
    model.free_dof_count = m0;
    model.total_dof_count = ndof;
    model.free_to_global = std::move(free_to_global);
    model.global_to_free = std::move(global_to_free);
    return model;
}

std::vector<double> StandardProblem::overlap_weights(std::size_t j0) const {
    if (j0 >= m0) {
        throw std::out_of_range("StandardProblem: basis index out of range");
    }
    std::vector<double> w(m0);
    for (std::size_t k = 0; k < m0; ++k) {
        double v = eigenvectors(static_cast<Eigen::Index>(j0),
                                static_cast<Eigen::Index>(k));
        w[k] = v * v;
    }
    return w;
}

double StandardProblem::frequency_hz(std::size_t k) const {
    return std::sqrt(alpha * eigenvalues[k]) / (2.0 * std::numbers::pi);
}

StandardProblem standardize(const FemModel& model, double target_norm,
                            bool pad_to_power_of_two) {
    if (!(target_norm > 0.0 && target_norm < 1.0)) {
        throw std::invalid_argument("standardize: target_norm must be in (0, 1)");
    }
    const auto m0 = static_cast<Eigen::Index>(model.free_dof_count);
    Eigen::VectorXd inv_sqrt_mass =
        model.mass_diagonal.array().sqrt().inverse().matrix();
    Eigen::MatrixXd a = Eigen::MatrixXd(model.stiffness);
    a = inv_sqrt_mass.asDiagonal() * a * inv_sqrt_mass.asDiagonal();
    // enforce exact symmetry before the eigensolve
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("standardize: eigensolve failed to converge");
    }

    // Eigen returns ascending eigenvalues; flip to descending lambda so that
    // phases come out ascending.
    Eigen::VectorXd lam = solver.eigenvalues().reverse();
    double alpha = lam(0) / target_norm;
    std::vector<double> scaled(model.free_dof_count);
    for (Eigen::Index k = 0; k < m0; ++k) {
        // scale via the ratio so the top eigenvalue lands on target_norm exactly
        scaled[static_cast<std::size_t>(k)] = lam(k) / lam(0) * target_norm;
    }

    PhaseMapping mapping = phases_from_eigenvalues(scaled);
    std::size_t padded = 1;
    while (padded < model.free_dof_count) padded *= 2;

    return StandardProblem{
        .eigenvalues = std::move(scaled),
        .alpha = alpha,
        .eigenvectors = solver.eigenvectors().rowwise().reverse(),
        .spectrum = std::move(mapping.spectrum),
        .m0 = model.free_dof_count,
        .padded_dimension = pad_to_power_of_two ? padded : model.free_dof_count,
        .clamped_modes = std::move(mapping.clamped_indices)};
}

void write_stiffness_coordinate(const FemModel& model, std::ostream& out) {
    out << "% symmetric coordinate format: row col value (1-based, upper triangle)\n";
    out << model.free_dof_count << " " << model.free_dof_count << " ";
    std::size_t nnz = 0;
    for (int k = 0; k < model.stiffness.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.stiffness, k); it; ++it) {
            if (it.row() <= it.col()) ++nnz;
        }
    }
    out << nnz << "\n";
    for (int k = 0; k < model.stiffness.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.stiffness, k); it; ++it) {
            if (it.row() <= it.col()) {
                out << (it.row() + 1) << " " << (it.col() + 1) << " " << it.value() << "\n";
            }
        }
    }
}

void write_mass_diagonal(const FemModel& model, std::ostream& out) {
    for (Eigen::Index i = 0; i < model.mass_diagonal.size(); ++i) {
        out << model.mass_diagonal(i) << "\n";
    }
}

std::string model_manifest_json(const BeamConfig& config, const FemModel& model,
                                const StandardProblem& problem) {
    nlohmann::json j;
    j["config"] = {{"length_mm", config.length_mm},
                   {"width_mm", config.width_mm},
                   {"height_mm", config.height_mm},
                   {"nx", config.nx},
                   {"ny", config.ny},
                   {"nz", config.nz},
                   {"youngs_mpa", config.youngs_mpa},
                   {"poisson", config.poisson},
                   {"density_tonne_mm3", config.density_tonne_mm3}};
    j["total_dofs"] = model.total_dof_count;
    j["free_dofs"] = model.free_dof_count;
    j["alpha"] = problem.alpha;
    j["padded_dimension"] = problem.padded_dimension;
    j["lambda_scaled_min"] = problem.eigenvalues.back();
    j["lambda_scaled_max"] = problem.eigenvalues.front();
    j["fundamental_hz"] = problem.frequency_hz(problem.m0 - 1);
    j["clamped_modes"] = problem.clamped_modes.size();
    return j.dump(2);
}

}  // namespace saqpe
