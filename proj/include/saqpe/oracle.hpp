#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace saqpe {

/// A small unitary for circuit-level cross-checks (dimension <= 16).
class SmallUnitary {
public:
    /// Validates unitarity: max |U*U - I| < 1e-12.
    explicit SmallUnitary(Eigen::MatrixXcd matrix);

    std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    /// diag(e^{2pi i theta_k}) for given phases in [0, 1).
    static SmallUnitary diagonal_phases(const std::vector<double>& phases);

    /// Haar-distributed unitary via QR of a complex Gaussian matrix.
    static SmallUnitary random(std::size_t dimension, std::uint64_t seed);

private:
    Eigen::MatrixXcd matrix_;
};

/// Full statevector simulation of the textbook QPE circuit: Hadamards on the
/// n-bit ancilla register, controlled powers U^(2^t) accumulated by repeated
/// squaring, then the inverse QFT as an explicit dense matrix. Returns the
/// marginal ancilla measurement distribution over N = 2^n outcomes.
///
/// Requires a normalized init vector and dimension * 2^n <= 4096.
std::vector<double> qpe_circuit_probabilities(const SmallUnitary& unitary,
                                              const Eigen::VectorXcd& init,
                                              int ancilla_bits);

/// Eigenphases (arg of eigenvalues, mapped to [0,1)) and eigenvectors of a
/// small unitary; column k of `eigenvectors` belongs to phases[k].
struct UnitaryEigensystem {
    std::vector<double> phases;
    Eigen::MatrixXcd eigenvectors;
};

UnitaryEigensystem unitary_eigensystem(const SmallUnitary& unitary);

}  // namespace saqpe
