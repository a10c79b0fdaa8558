#include "saqpe/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace saqpe {

namespace {
using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

SmallUnitary::SmallUnitary(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1 || matrix_.rows() > 16) {
        throw std::invalid_argument("SmallUnitary: dimension must be in [1, 16]");
    }
    Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
    gram -= Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
    if (gram.cwiseAbs().maxCoeff() >= 1e-12) {
        throw std::invalid_argument("SmallUnitary: matrix is not unitary (1e-12)");
    }
}

SmallUnitary SmallUnitary::diagonal_phases(const std::vector<double>& phases) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(phases.size()), static_cast<Eigen::Index>(phases.size()));
    for (std::size_t k = 0; k < phases.size(); ++k) {
        u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
            std::polar(1.0, kTwoPi * phases[k]);
    }
    return SmallUnitary(std::move(u));
}

SmallUnitary SmallUnitary::random(std::size_t dimension, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto d = static_cast<Eigen::Index>(dimension);
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    // fix the phase convention so the distribution is Haar
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        Complex diag = r(j, j);
        double mag = std::abs(diag);
        q.col(j) *= (mag > 0.0) ? diag / mag : Complex(1.0, 0.0);
    }
    return SmallUnitary(std::move(q));
}

std::vector<double> qpe_circuit_probabilities(const SmallUnitary& unitary,
                                              const Eigen::VectorXcd& init,
                                              int ancilla_bits) {
    if (ancilla_bits < 1 || ancilla_bits > 8) {
        throw std::invalid_argument("qpe_circuit_probabilities: n must be in [1, 8]");
    }
    const auto dim = static_cast<std::uint64_t>(unitary.dimension());
    const std::uint64_t n_outcomes = std::uint64_t{1} << ancilla_bits;
    if (dim * n_outcomes > 4096) {
        throw std::invalid_argument("qpe_circuit_probabilities: state too large");
    }
    if (static_cast<std::uint64_t>(init.size()) != dim) {
        throw std::invalid_argument("qpe_circuit_probabilities: init size mismatch");
    }
    if (std::fabs(init.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("qpe_circuit_probabilities: init not normalized");
    }

    const auto n = static_cast<Eigen::Index>(n_outcomes);
    const auto m = static_cast<Eigen::Index>(dim);

    // After the Hadamards and the controlled powers, ancilla row j of the
    // joint state holds U^j |psi> / sqrt(N). U^j is accumulated from the
    // squared powers U^(2^t), exactly as the controlled-power ladder does.
    std::vector<Eigen::MatrixXcd> pow2(static_cast<std::size_t>(ancilla_bits));
    pow2[0] = unitary.matrix();
    for (int t = 1; t < ancilla_bits; ++t) {
        pow2[static_cast<std::size_t>(t)] =
            pow2[static_cast<std::size_t>(t - 1)] * pow2[static_cast<std::size_t>(t - 1)];
    }

    Eigen::MatrixXcd joint(n, m);  // row j = system amplitudes for ancilla |j>
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_outcomes));
    for (std::uint64_t j = 0; j < n_outcomes; ++j) {
        Eigen::VectorXcd v = init;
        for (int t = 0; t < ancilla_bits; ++t) {
            if (j & (std::uint64_t{1} << t)) v = pow2[static_cast<std::size_t>(t)] * v;
        }
        joint.row(static_cast<Eigen::Index>(j)) = (scale * v).transpose();
    }

    // Inverse QFT on the ancilla register as an explicit dense matrix.
    Eigen::MatrixXcd inverse_qft(n, n);
    for (Eigen::Index y = 0; y < n; ++y) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double angle = -kTwoPi * static_cast<double>(y) * static_cast<double>(j) /
                           static_cast<double>(n_outcomes);
            inverse_qft(y, j) = std::polar(scale, angle);
        }
    }
    Eigen::MatrixXcd out = inverse_qft * joint;

    std::vector<double> probs(n_outcomes);
    for (std::uint64_t y = 0; y < n_outcomes; ++y) {
        probs[y] = out.row(static_cast<Eigen::Index>(y)).squaredNorm();
    }
    return probs;
}

UnitaryEigensystem unitary_eigensystem(const SmallUnitary& unitary) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(unitary.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("unitary_eigensystem: eigensolve failed");
    }
    UnitaryEigensystem sys;
    sys.eigenvectors = solver.eigenvectors();
    sys.phases.reserve(unitary.dimension());
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        double angle = std::arg(solver.eigenvalues()(k)) / kTwoPi;
        double reduced = angle - std::floor(angle);
        sys.phases.push_back(reduced < 1.0 ? reduced : 0.0);
    }
    return sys;
}

}  // namespace saqpe
