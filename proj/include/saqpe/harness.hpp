#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "saqpe/detection.hpp"
#include "saqpe/fem.hpp"
#include "saqpe/shots.hpp"
#include "saqpe/spectrum.hpp"

namespace saqpe {

/// Raised when the requested grid violates the separation gate
/// 3/N < min adjacent gap; carries the smallest admissible n.
struct MinGapGateError : std::runtime_error {
    MinGapGateError(const std::string& what, int required_bits)
        : std::runtime_error(what), required_ancilla_bits(required_bits) {}
    int required_ancilla_bits;
};

struct ExperimentConfig {
    BeamConfig beam;
    int ancilla_bits = 0;  // 0 = minimal n passing the separation gate
    double delta = 0.001;
    std::vector<double> shot_fractions = {1.0};
    std::vector<std::uint64_t> seeds = {1};
    enum class SamplerKind { TwoStage, UniformRejection } sampler = SamplerKind::TwoStage;
    int threads = 0;

    static ExperimentConfig desk();
    /// Paper-style full run: 16x6x2 beam, fractions 0.25/0.5/0.75/1.0/1.5.
    static ExperimentConfig experiment1();
    /// Critical-shot-count sweep: fractions 0.005..0.1, three seeds each.
    static ExperimentConfig experiment2();

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct MatchScore {
    std::size_t matched = 0;
    std::size_t spurious = 0;    // estimates with no truth phase within 1/N
    std::size_t undetected = 0;  // truth phases with no matched estimate
    double phase_rmse = 0.0;     // over matched pairs
    double phase_err_max = 0.0;  // worst matched torus error
    double freq_rel_max = 0.0;   // over matched pairs
};

/// Greedy nearest-on-torus matching with radius 1/N. Frequencies on both
/// sides are recovered through the same alpha scaling.
MatchScore match_and_score(const std::vector<PhaseEstimate>& estimates,
                           const Spectrum& truth, const PhaseGrid& grid,
                           double alpha);

struct TrialResult {
    double fraction = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    std::size_t detected = 0;  // r_hat = number of phase estimates
    double detection_rate = 0.0;
    MatchScore score;
    std::size_t anomalous_runs = 0;
    SampleTheoremReport properties;
    double runtime_seconds = 0.0;
};

struct ExperimentReport {
    std::size_t m0 = 0;
    std::size_t target_modes = 0;  // r
    int ancilla_bits = 0;
    std::uint64_t grid_size = 0;
    double min_phase_gap = 0.0;
    double alpha = 0.0;
    ShotPlan plan;
    std::uint64_t baseline_shots = 0;  // plan.suggested_shots
    std::vector<TrialResult> trials;

    /// Table-shaped CSV, one row per (fraction, seed) trial.
    void write_csv(std::ostream& out) const;
    std::string to_json() const;
};

/// Full pipeline: build -> standardize -> separation gate -> shot plan ->
/// sample -> detect -> estimate -> recover -> score, per (fraction, seed).
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace saqpe
