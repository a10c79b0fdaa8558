#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "saqpe/qpe_dist.hpp"
#include "saqpe/sampler.hpp"
#include "saqpe/spectrum.hpp"
#include "saqpe/torus.hpp"

namespace saqpe {

/// The threshold constants of the peak-detection theory.
///   tau   = 4/pi^2                      (main-lobe floor)
///   sigma = (2/pi^2) sum 1/(3l+1)^2     (off-peak ceiling coefficient)
///   gamma = 1 + (pi^2/6 - sum)/pi^2     (peak-bin ceiling coefficient)
///   d_n   = (1 - tau)/N^2               (grid-dependent remainder)
struct DetectionConstants {
    double tau = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double d_n = 0.0;

    double exact_threshold(std::size_t modes) const {
        return tau / static_cast<double>(modes);
    }
    /// (tau+sigma)/(2 m0) + d_N/2, the empirical threshold at epsilon_max.
    double empirical_threshold(std::size_t m0) const {
        return (tau + sigma) / (2.0 * static_cast<double>(m0)) + d_n / 2.0;
    }
};

/// Requires N >= 8 (the constants' derivation assumes it).
DetectionConstants detection_constants(const PhaseGrid& grid);

/// sum_{l>=0} 1/(3l+1)^2 by partial sum plus analytic tail, cached after the
/// first call; absolute error < 1e-12.
double inverse_square_series();

/// Grid bins whose probability clears a detection threshold.
struct DetectionSet {
    enum class Source { Exact, Empirical };

    PhaseGrid grid;
    std::vector<std::uint64_t> bins;  // sorted ascending
    double threshold = 0.0;
    Source source = Source::Exact;

    bool contains(std::uint64_t bin) const;

    /// Maximal runs of cyclically consecutive bins, each listed in cyclic
    /// order; a run may wrap through bin 0.
    std::vector<std::vector<std::uint64_t>> cyclic_runs() const;
};

/// C = { a_j : p_j >= tau/r }. Dense distributions are scanned exhaustively;
/// lazy ones only need bins within two grid steps of each retained phase
/// (everything else is provably below threshold).
DetectionSet detect_exact(const QpeDistribution& dist, std::size_t modes);

/// C_hat = { a_j : p_hat_j >= (tau+sigma)/(2 m0) + d_N/2 }, scanned over the
/// occupied bins of the empirical distribution.
DetectionSet detect_empirical(const EmpiricalDistribution& empirical, std::size_t m0);

/// Conclusions of the exact peak-detection theorem, checked literally.
struct PeakTheoremReport {
    bool hypotheses_met = false;
    std::string hypothesis_note;
    bool neighborhoods_disjoint = false;  // (1)
    bool every_neighborhood_hit = false;  // (2)
    bool no_false_positives = false;      // (3)
    bool grid_not_covered = false;        // (4)
    bool no_triple_runs = false;          // (5)
    std::vector<std::uint64_t> counterexample_bins;

    bool all_pass() const {
        return hypotheses_met && neighborhoods_disjoint && every_neighborhood_hit &&
               no_false_positives && grid_not_covered && no_triple_runs;
    }
};

PeakTheoremReport check_peak_theorem(const DetectionSet& detected,
                                     const Spectrum& spectrum, const PhaseGrid& grid);

/// Conclusions of the sampled-peak theorem for C_hat with a known spectrum.
struct SampleTheoremReport {
    bool hypotheses_met = false;
    std::string hypothesis_note;
    bool every_neighborhood_hit = false;   // (1)
    bool triple_runs_pin_grid = false;     // (2), includes "no run longer than 3"
    bool pair_runs_bracket = false;        // (3)
    bool singles_within_half_bin = false;  // (4)
    bool statistical_caveat = true;  // conclusions hold on the good event only
    std::vector<std::uint64_t> counterexample_bins;

    bool all_pass() const {
        return hypotheses_met && every_neighborhood_hit && triple_runs_pin_grid &&
               pair_runs_bracket && singles_within_half_bin;
    }
};

SampleTheoremReport check_sample_theorem(const DetectionSet& detected,
                                         const Spectrum& spectrum,
                                         const PhaseGrid& grid);

enum class EstimationRule { TripleCenter, PairInterpolation, Single };

struct PhaseEstimate {
    double phase = 0.0;                  // theta_hat
    std::vector<std::uint64_t> run_bins; // contributing bins, cyclic order
    EstimationRule rule = EstimationRule::Single;
    bool from_anomalous_run = false;     // run longer than 3, split at local maxima
};

/// Run-based estimation: triple run -> center bin, pair run -> count-weighted
/// torus interpolation, single bin -> the bin itself. Runs longer than three
/// are split at strict local maxima of p_hat and flagged.
std::vector<PhaseEstimate> estimate_phases(const DetectionSet& detected,
                                           const EmpiricalDistribution& empirical);

struct FrequencyEstimate {
    double frequency_hz = 0.0;
    double phase = 0.0;
    bool clamped = false;  // cos clamped up to 0
};

struct FrequencyRecovery {
    std::vector<FrequencyEstimate> estimates;
    std::size_t clamp_events = 0;
};

/// f_hat = sqrt(alpha * cos(2 pi theta_hat / 4)) / (2 pi).
FrequencyRecovery recover_frequencies(const std::vector<PhaseEstimate>& estimates,
                                      double alpha);

/// Full detection report as JSON: constants, threshold, bins, runs, phase
/// estimates at 17 digits, frequencies, property booleans when available.
std::string detection_report_json(const DetectionSet& detected,
                                  const std::vector<PhaseEstimate>& estimates,
                                  const FrequencyRecovery* frequencies,
                                  const DetectionConstants& constants,
                                  const SampleTheoremReport* properties);

}  // namespace saqpe
