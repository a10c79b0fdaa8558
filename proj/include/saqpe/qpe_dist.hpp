#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "saqpe/fem.hpp"
#include "saqpe/spectrum.hpp"
#include "saqpe/torus.hpp"

namespace saqpe {

/// Per-mode probability weights: nonnegative, summing to 1 within 1e-12.
class ModeWeights {
public:
    explicit ModeWeights(std::vector<double> weights);
    static ModeWeights uniform(std::size_t count);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t k) const { return weights_[k]; }
    const std::vector<double>& values() const { return weights_; }

private:
    std::vector<double> weights_;
};

/// Exact QPE output distribution p_j = sum_k w_k * Ftilde_N(2pi(theta_k - a_j)).
///
/// Dense mode stores the full probability vector (grids up to 2^22 bins);
/// larger grids evaluate lazily per bin at O(r) cost from the retained
/// spectrum and weights. Both modes evaluate the same formula.
class QpeDistribution {
public:
    static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

    QpeDistribution(Spectrum spectrum, ModeWeights weights, PhaseGrid grid);

    const PhaseGrid& grid() const { return grid_; }
    const Spectrum& spectrum() const { return spectrum_; }
    const ModeWeights& weights() const { return weights_; }

    bool is_dense() const { return !dense_.empty(); }
    double prob(std::uint64_t bin) const;

    /// Dense probability vector; throws when the grid is in lazy mode.
    const std::vector<double>& dense() const;

    /// CSV rows "j,a_j,p_j" (dense mode only).
    void write_csv(std::ostream& out) const;

private:
    Spectrum spectrum_;
    ModeWeights weights_;
    PhaseGrid grid_;
    std::vector<double> dense_;
};

QpeDistribution exact_weighted(const Spectrum& spectrum, const ModeWeights& weights,
                               const PhaseGrid& grid);

/// Uniform-weight distribution: the state-averaged QPE measure over r modes.
QpeDistribution state_averaged(const Spectrum& spectrum, const PhaseGrid& grid);

/// Distribution of a single QPE shot started from computational basis state
/// j0: weights are the squared eigenvector components of row j0.
QpeDistribution conditional_on_basis(const StandardProblem& problem, std::size_t j0,
                                     const PhaseGrid& grid);

}  // namespace saqpe
