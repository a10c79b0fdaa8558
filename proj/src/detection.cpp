#include "saqpe/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace saqpe {

namespace {
constexpr double kPi = std::numbers::pi;

// Phases that are exactly on-grid get pinned by triple runs; this tolerance
// only has to separate "equal as doubles" from a genuine half-bin offset.
constexpr double kOnGridTol = 1e-14;

std::string format_17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

double inverse_square_series() {
    static const double value = [] {
        // partial sum of 1/(3l+1)^2 to L, then the trapezoid-corrected
        // integral tail 1/(3(3L + 5/2)); absolute error ~1e-20
        constexpr long kTerms = 1000000;
        double sum = 0.0;
        for (long l = kTerms; l >= 0; --l) {
            double q = 3.0 * static_cast<double>(l) + 1.0;
            sum += 1.0 / (q * q);
        }
        sum += 1.0 / (3.0 * (3.0 * static_cast<double>(kTerms) + 2.5));
        return sum;
    }();
    return value;
}

DetectionConstants detection_constants(const PhaseGrid& grid) {
    if (grid.size() < 8) {
        throw std::invalid_argument("detection_constants: requires N >= 8");
    }
    const double series = inverse_square_series();
    const double pi2 = kPi * kPi;
    DetectionConstants c;
    c.tau = 4.0 / pi2;
    c.sigma = 2.0 / pi2 * series;
    c.gamma = 1.0 + (pi2 / 6.0 - series) / pi2;
    double n = static_cast<double>(grid.size());
    c.d_n = (1.0 - c.tau) / (n * n);
    return c;
}

bool DetectionSet::contains(std::uint64_t bin) const {
    return std::binary_search(bins.begin(), bins.end(), bin);
}

std::vector<std::vector<std::uint64_t>> DetectionSet::cyclic_runs() const {
    std::vector<std::vector<std::uint64_t>> runs;
    if (bins.empty()) return runs;
    const std::uint64_t n = grid.size();
    if (bins.size() == n) {  // everything detected: one full-circle run
        runs.emplace_back(bins);
        return runs;
    }

    // start each run at a bin whose predecessor is absent
    std::vector<std::uint64_t> starts;
    for (std::uint64_t b : bins) {
        if (!contains((b + n - 1) % n)) starts.push_back(b);
    }
    for (std::uint64_t s : starts) {
        std::vector<std::uint64_t> run;
        std::uint64_t b = s;
        while (contains(b)) {
            run.push_back(b);
            b = (b + 1) % n;
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

DetectionSet detect_exact(const QpeDistribution& dist, std::size_t modes) {
    if (modes == 0) throw std::invalid_argument("detect_exact: modes must be positive");
    DetectionConstants c = detection_constants(dist.grid());
    const double threshold = c.exact_threshold(modes);

    std::vector<std::uint64_t> hits;
    if (dist.is_dense()) {
        const auto& p = dist.dense();
        for (std::uint64_t j = 0; j < p.size(); ++j) {
            if (p[j] >= threshold) hits.push_back(j);
        }
    } else {
        // Off-peak bins are provably below tau/M, so only the bins within
        // two grid steps of a retained phase can clear the threshold.
        std::set<std::uint64_t> candidates;
        const auto& grid = dist.grid();
        double n = static_cast<double>(grid.size());
        for (std::size_t k = 0; k < dist.spectrum().count(); ++k) {
            auto center = static_cast<std::int64_t>(
                std::floor(dist.spectrum().phase(k) * n));
            for (std::int64_t d = -2; d <= 2; ++d) {
                candidates.insert(grid.wrap(center + d));
            }
        }
        for (std::uint64_t j : candidates) {
            if (dist.prob(j) >= threshold) hits.push_back(j);
        }
        std::sort(hits.begin(), hits.end());
    }
    return DetectionSet{dist.grid(), std::move(hits), threshold,
                        DetectionSet::Source::Exact};
}

DetectionSet detect_empirical(const EmpiricalDistribution& empirical, std::size_t m0) {
    if (m0 == 0) throw std::invalid_argument("detect_empirical: m0 must be positive");
    DetectionConstants c = detection_constants(empirical.grid());
    const double threshold = c.empirical_threshold(m0);
    const auto total = static_cast<double>(empirical.total_shots());

    std::vector<std::uint64_t> hits;
    for (const auto& [bin, count] : empirical.counts()) {
        if (static_cast<double>(count) / total >= threshold) hits.push_back(bin);
    }
    std::sort(hits.begin(), hits.end());
    return DetectionSet{empirical.grid(), std::move(hits), threshold,
                        DetectionSet::Source::Empirical};
}

namespace {

bool hypotheses_hold(const Spectrum& spectrum, const PhaseGrid& grid,
                     bool strict_gap, std::string& note) {
    if (grid.size() < 4 * spectrum.count()) {
        note = "requires N >= 4M";
        return false;
    }
    if (spectrum.count() >= 2) {
        SeparationReport sep = min_gap(spectrum);
        double bound = 3.0 / static_cast<double>(grid.size());
        bool ok = strict_gap ? (bound < sep.min_gap) : (bound <= sep.min_gap);
        if (!ok) {
            note = "requires 3/N <= min adjacent gap (min n = " +
                   std::to_string(sep.min_ancilla_bits) + ")";
            return false;
        }
    }
    return true;
}

// index of some phase within torus distance `radius` of x, or -1
std::ptrdiff_t phase_near(const Spectrum& spectrum, TorusPoint x, double radius) {
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        if (torus_distance(TorusPoint(spectrum.phase(k)), x) <= radius) {
            return static_cast<std::ptrdiff_t>(k);
        }
    }
    return -1;
}

// is some phase inside the closed arc [a, b] walked forward from a to b?
bool phase_in_arc(const Spectrum& spectrum, double a, double b) {
    double len = TorusPoint::reduce(b - a);
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        double off = TorusPoint::reduce(spectrum.phase(k) - a);
        if (off <= len) return true;
    }
    return false;
}

}  // namespace

PeakTheoremReport check_peak_theorem(const DetectionSet& detected,
                                     const Spectrum& spectrum, const PhaseGrid& grid) {
    PeakTheoremReport report;
    report.hypotheses_met = hypotheses_hold(spectrum, grid, false, report.hypothesis_note);
    if (!report.hypotheses_met) return report;

    const double inv_n = grid.spacing();
    const std::uint64_t n = grid.size();

    // (1) closed 1/N-neighborhoods are pairwise disjoint
    report.neighborhoods_disjoint = true;
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        std::size_t next = (k + 1) % spectrum.count();
        if (spectrum.count() > 1 &&
            torus_distance(TorusPoint(spectrum.phase(k)),
                           TorusPoint(spectrum.phase(next))) <= 2.0 * inv_n) {
            report.neighborhoods_disjoint = false;
        }
    }

    // (2) every I_k holds a detected bin
    report.every_neighborhood_hit = true;
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        TorusInterval ik(TorusPoint(spectrum.phase(k)), inv_n);
        bool hit = false;
        for (std::uint64_t b : grid_points_in(ik, grid)) {
            if (detected.contains(b)) {
                hit = true;
                break;
            }
        }
        if (!hit) report.every_neighborhood_hit = false;
    }

    // (3) every detected bin lies in some I_k
    report.no_false_positives = true;
    for (std::uint64_t b : detected.bins) {
        if (phase_near(spectrum, grid.point(static_cast<std::int64_t>(b)), inv_n) < 0) {
            report.no_false_positives = false;
            report.counterexample_bins.push_back(b);
        }
    }

    // (4) the neighborhoods do not cover the grid
    std::uint64_t covered = 0;
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        TorusInterval ik(TorusPoint(spectrum.phase(k)), inv_n);
        covered += grid_points_in(ik, grid).size();
    }
    report.grid_not_covered = covered < n;

    // (5) no three consecutive detected bins
    report.no_triple_runs = true;
    for (std::uint64_t b : detected.bins) {
        if (detected.contains((b + n - 1) % n) && detected.contains((b + 1) % n)) {
            report.no_triple_runs = false;
            report.counterexample_bins.push_back(b);
        }
    }
    return report;
}

SampleTheoremReport check_sample_theorem(const DetectionSet& detected,
                                         const Spectrum& spectrum,
                                         const PhaseGrid& grid) {
    SampleTheoremReport report;
    report.hypotheses_met = hypotheses_hold(spectrum, grid, true, report.hypothesis_note);
    if (!report.hypotheses_met) return report;

    const double inv_n = grid.spacing();

    // (1) every I_k holds a detected bin
    report.every_neighborhood_hit = true;
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        TorusInterval ik(TorusPoint(spectrum.phase(k)), inv_n);
        bool hit = false;
        for (std::uint64_t b : grid_points_in(ik, grid)) {
            if (detected.contains(b)) {
                hit = true;
                break;
            }
        }
        if (!hit) report.every_neighborhood_hit = false;
    }

    report.triple_runs_pin_grid = true;
    report.pair_runs_bracket = true;
    report.singles_within_half_bin = true;
    for (const auto& run : detected.cyclic_runs()) {
        if (run.size() == 3) {
            TorusPoint center = grid.point(static_cast<std::int64_t>(run[1]));
            if (phase_near(spectrum, center, kOnGridTol) < 0) {
                report.triple_runs_pin_grid = false;
                report.counterexample_bins.push_back(run[1]);
            }
        } else if (run.size() == 2) {
            double a = grid.point(static_cast<std::int64_t>(run[0])).value();
            if (!phase_in_arc(spectrum, a, a + inv_n)) {
                report.pair_runs_bracket = false;
                report.counterexample_bins.push_back(run[0]);
            }
        } else if (run.size() == 1) {
            TorusPoint center = grid.point(static_cast<std::int64_t>(run[0]));
            if (phase_near(spectrum, center, inv_n / 2.0) < 0) {
                report.singles_within_half_bin = false;
                report.counterexample_bins.push_back(run[0]);
            }
        } else {
            // runs longer than three contradict conclusion (2)
            report.triple_runs_pin_grid = false;
            report.counterexample_bins.push_back(run.front());
        }
    }
    return report;
}

std::vector<PhaseEstimate> estimate_phases(const DetectionSet& detected,
                                           const EmpiricalDistribution& empirical) {
    const PhaseGrid& grid = detected.grid;
    const double inv_n = grid.spacing();
    std::vector<PhaseEstimate> estimates;

    auto pair_estimate = [&](std::uint64_t lo, std::uint64_t hi, bool anomalous) {
        double w_lo = static_cast<double>(empirical.count(lo));
        double w_hi = static_cast<double>(empirical.count(hi));
        double a_lo = grid.point(static_cast<std::int64_t>(lo)).value();
        // torus-aware: interpolate along the forward arc from a_lo
        double t = (w_lo + w_hi) > 0 ? w_hi / (w_lo + w_hi) : 0.5;
        estimates.push_back(PhaseEstimate{TorusPoint::reduce(a_lo + t * inv_n),
                                          {lo, hi},
                                          EstimationRule::PairInterpolation,
                                          anomalous});
    };

    for (const auto& run : detected.cyclic_runs()) {
        if (run.size() == 1) {
            estimates.push_back(
                PhaseEstimate{grid.point(static_cast<std::int64_t>(run[0])).value(),
                              run,
                              EstimationRule::Single,
                              false});
        } else if (run.size() == 2) {
            pair_estimate(run[0], run[1], false);
        } else if (run.size() == 3) {
            estimates.push_back(
                PhaseEstimate{grid.point(static_cast<std::int64_t>(run[1])).value(),
                              run,
                              EstimationRule::TripleCenter,
                              false});
        } else {
            // Off the good event: split the run at strict local maxima of the
            // counts, one estimate per maximum.
            const std::size_t len = run.size();
            for (std::size_t i = 0; i < len; ++i) {
                auto c = static_cast<double>(empirical.count(run[i]));
                double left = i > 0 ? static_cast<double>(empirical.count(run[i - 1]))
                                    : -1.0;
                double right = i + 1 < len
                                   ? static_cast<double>(empirical.count(run[i + 1]))
                                   : -1.0;
                if (c > left && c > right) {
                    estimates.push_back(PhaseEstimate{
                        grid.point(static_cast<std::int64_t>(run[i])).value(),
                        {run[i]},
                        EstimationRule::Single,
                        true});
                }
            }
        }
    }

    std::sort(estimates.begin(), estimates.end(),
              [](const PhaseEstimate& a, const PhaseEstimate& b) {
                  return a.phase < b.phase;
              });
    return estimates;
}

FrequencyRecovery recover_frequencies(const std::vector<PhaseEstimate>& estimates,
                                      double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("recover_frequencies: alpha must be positive");
    }
    FrequencyRecovery out;
    out.estimates.reserve(estimates.size());
    for (const auto& est : estimates) {
        double c = std::cos(2.0 * kPi * est.phase / 4.0);
        bool clamped = c < 0.0;
        if (clamped) {
            c = 0.0;
            ++out.clamp_events;
        }
        out.estimates.push_back(FrequencyEstimate{
            std::sqrt(alpha * c) / (2.0 * kPi), est.phase, clamped});
    }
    return out;
}

std::string detection_report_json(const DetectionSet& detected,
                                  const std::vector<PhaseEstimate>& estimates,
                                  const FrequencyRecovery* frequencies,
                                  const DetectionConstants& constants,
                                  const SampleTheoremReport* properties) {
    nlohmann::json j;
    j["constants"] = {{"tau", constants.tau},
                      {"sigma", constants.sigma},
                      {"gamma", constants.gamma},
                      {"d_n", constants.d_n}};
    j["threshold"] = detected.threshold;
    j["source"] =
        detected.source == DetectionSet::Source::Exact ? "exact" : "empirical";
    j["ancilla_bits"] = detected.grid.ancilla_bits();
    j["bins"] = detected.bins;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : detected.cyclic_runs()) runs.push_back(run);
    j["runs"] = runs;

    nlohmann::json ests = nlohmann::json::array();
    for (const auto& est : estimates) {
        nlohmann::json e;
        e["phase"] = format_17(est.phase);
        e["bins"] = est.run_bins;
        switch (est.rule) {
            case EstimationRule::TripleCenter: e["rule"] = "triple-center"; break;
            case EstimationRule::PairInterpolation: e["rule"] = "pair-interpolation"; break;
            case EstimationRule::Single: e["rule"] = "single"; break;
        }
        if (est.from_anomalous_run) e["anomalous_run"] = true;
        ests.push_back(e);
    }
    j["estimates"] = ests;

    if (frequencies != nullptr) {
        nlohmann::json freqs = nlohmann::json::array();
        for (const auto& f : frequencies->estimates) freqs.push_back(f.frequency_hz);
        j["frequencies_hz"] = freqs;
        j["frequency_clamp_events"] = frequencies->clamp_events;
    }
    if (properties != nullptr) {
        j["properties"] = {{"hypotheses_met", properties->hypotheses_met},
                           {"every_neighborhood_hit", properties->every_neighborhood_hit},
                           {"triple_runs_pin_grid", properties->triple_runs_pin_grid},
                           {"pair_runs_bracket", properties->pair_runs_bracket},
                           {"singles_within_half_bin", properties->singles_within_half_bin},
                           {"statistical_caveat", properties->statistical_caveat}};
    }
    return j.dump(2);
}

}  // namespace saqpe
