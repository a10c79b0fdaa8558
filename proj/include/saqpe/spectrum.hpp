#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "saqpe/torus.hpp"

namespace saqpe {

/// A set of distinct eigenphases on [0, 1), kept strictly increasing.
class Spectrum {
public:
    /// Validates monotonicity and range; throws on duplicates within 1e-15.
    static Spectrum from_sorted(std::vector<double> phases);
    /// Sorts first, then validates as above.
    static Spectrum from_values(std::vector<double> phases);

    std::size_t count() const { return phases_.size(); }
    double phase(std::size_t k) const { return phases_[k]; }
    const std::vector<double>& phases() const { return phases_; }

    /// JSON array of decimal strings with 17 significant digits
    /// (bit-exact double round trip).
    std::string to_json() const;
    static Spectrum from_json(const std::string& text);

private:
    explicit Spectrum(std::vector<double> phases) : phases_(std::move(phases)) {}
    std::vector<double> phases_;
};

/// Tolerance below which two phases count as the same eigenphase.
inline constexpr double kDistinctPhaseTol = 1e-15;

struct SeparationReport {
    double min_gap = 0.0;       // min cyclic adjacent torus gap
    int min_ancilla_bits = 0;   // smallest n with 3/2^n < min_gap
    std::uint64_t min_grid_size = 0;  // 2^min_ancilla_bits

    bool satisfies_3_over_n(const PhaseGrid& grid) const {
        return 3.0 / static_cast<double>(grid.size()) < min_gap;
    }
};

/// Minimum cyclic adjacent gap and the smallest admissible grid.
/// Requires at least two phases.
SeparationReport min_gap(const Spectrum& spectrum);

/// Result of mapping eigenvalues to phases; clamp events are recorded
/// rather than silently absorbed.
struct PhaseMapping {
    Spectrum spectrum;
    std::vector<std::size_t> clamped_indices;  // inputs pushed back into (eps, 1-eps)
};

/// Phase map theta_k = 2*acos(lambda_k)/pi for lambda in (0,1); output sorted
/// ascending. Eigenvalues at the domain edge (within 1e-9 of 0 or 1) are
/// clamped into (1e-12, 1 - 1e-12) and flagged; values further outside throw.
PhaseMapping phases_from_eigenvalues(const std::vector<double>& eigenvalues);

/// Eigenvalue back out of a phase: lambda = cos(pi*theta/2).
double eigenvalue_from_phase(double phase);

/// r phases uniformly random subject to every cyclic gap >= min_sep_bins/N.
/// Deterministic per seed. Requires N >= 4r and r*min_sep_bins/N < 1.
Spectrum synthetic_spectrum(std::size_t count, const PhaseGrid& grid,
                            double min_sep_bins, std::uint64_t seed);

}  // namespace saqpe
