#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "saqpe/torus.hpp"

namespace saqpe {

/// Bernoulli KL divergence between parameters (x+a) and x:
///   H+(x, a) = (x+a) log((x+a)/x) + (1-x-a) log((1-x-a)/(1-x)).
/// Natural logs. Requires 0 <= a < 1/3 and 0 < x < 1-a; a = 0 gives 0.
double kl_plus(double x, double a);

/// The downward analog between (x-a) and x; requires a < x < 1.
double kl_minus(double x, double a);

/// Largest admissible detection margin: (tau - sigma)/2 - M_eff * d_N / 2.
/// Throws if the result is not positive.
double epsilon_max(std::size_t m_eff, const PhaseGrid& grid);

/// Sufficient shot count and its failure terms for detecting all peaks of a
/// state-averaged distribution over m_eff modes on grid N at confidence
/// 1 - delta:  K >= log((N + M)/delta) / H+(gamma/M + d_N, eps/M).
struct ShotPlan {
    std::size_t m_eff = 0;
    int ancilla_bits = 0;
    std::uint64_t grid_size = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    std::uint64_t shot_bound = 0;       // ceil of the bound
    std::uint64_t suggested_shots = 0;  // rounded up to the next 10,000
    double peak_miss_term = 0.0;        // 2M exp(-K H-) at K = shot_bound
    double false_positive_term = 0.0;   // (N-M) exp(-K H+) at K = shot_bound

    std::string to_json() const;
};

/// Requires m_eff >= 3, N >= 4 m_eff, and 0 < epsilon <= epsilon_max.
ShotPlan shot_bound(std::size_t m_eff, const PhaseGrid& grid, double delta,
                    double epsilon);

/// Same with epsilon = epsilon_max(m_eff, grid).
ShotPlan shot_bound(std::size_t m_eff, const PhaseGrid& grid, double delta);

/// Failure probability bounds after K shots, both clamped to 1:
///   two_term = 2M exp(-K H-) + (N-M) exp(-K H+)
///   coarse   = (N+M) exp(-K H+)
struct FailureBound {
    double two_term = 1.0;
    double coarse = 1.0;
};

FailureBound failure_bound(std::uint64_t shots, std::size_t m_eff,
                           const PhaseGrid& grid, double epsilon);

}  // namespace saqpe
