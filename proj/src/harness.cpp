#include "saqpe/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <tuple>

#include "json.hpp"

#include "saqpe/qpe_dist.hpp"
#include "saqpe/sampler.hpp"

namespace saqpe {

ExperimentConfig ExperimentConfig::desk() {
    ExperimentConfig cfg;
    cfg.beam = BeamConfig::desk();
    cfg.seeds = {1, 2, 3, 4, 5};
    return cfg;
}

ExperimentConfig ExperimentConfig::experiment1() {
    ExperimentConfig cfg;
    cfg.shot_fractions = {0.25, 0.5, 0.75, 1.0, 1.5};
    cfg.seeds = {1};
    return cfg;
}

ExperimentConfig ExperimentConfig::experiment2() {
    ExperimentConfig cfg;
    cfg.shot_fractions = {0.005, 0.01, 0.02, 0.03, 0.05, 0.1};
    cfg.seeds = {1, 2, 3};
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["beam"] = {{"length_mm", beam.length_mm},   {"width_mm", beam.width_mm},
                 {"height_mm", beam.height_mm},   {"nx", beam.nx},
                 {"ny", beam.ny},                 {"nz", beam.nz},
                 {"youngs_mpa", beam.youngs_mpa}, {"poisson", beam.poisson},
                 {"density_tonne_mm3", beam.density_tonne_mm3}};
    j["ancilla_bits"] = ancilla_bits;
    j["delta"] = delta;
    j["shot_fractions"] = shot_fractions;
    j["seeds"] = seeds;
    j["sampler"] = sampler == SamplerKind::TwoStage ? "two-stage" : "uniform-rejection";
    j["threads"] = threads;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("beam")) {
        const auto& b = j["beam"];
        cfg.beam.length_mm = b.value("length_mm", cfg.beam.length_mm);
        cfg.beam.width_mm = b.value("width_mm", cfg.beam.width_mm);
        cfg.beam.height_mm = b.value("height_mm", cfg.beam.height_mm);
        cfg.beam.nx = b.value("nx", cfg.beam.nx);
        cfg.beam.ny = b.value("ny", cfg.beam.ny);
        cfg.beam.nz = b.value("nz", cfg.beam.nz);
        cfg.beam.youngs_mpa = b.value("youngs_mpa", cfg.beam.youngs_mpa);
        cfg.beam.poisson = b.value("poisson", cfg.beam.poisson);
        cfg.beam.density_tonne_mm3 =
            b.value("density_tonne_mm3", cfg.beam.density_tonne_mm3);
    }
    cfg.ancilla_bits = j.value("ancilla_bits", 0);
    cfg.delta = j.value("delta", 0.001);
    cfg.shot_fractions = j.value("shot_fractions", std::vector<double>{1.0});
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
    std::string sampler = j.value("sampler", "two-stage");
    cfg.sampler = sampler == "uniform-rejection" ? SamplerKind::UniformRejection
                                                 : SamplerKind::TwoStage;
    cfg.threads = j.value("threads", 0);
    return cfg;
}

MatchScore match_and_score(const std::vector<PhaseEstimate>& estimates,
                           const Spectrum& truth, const PhaseGrid& grid,
                           double alpha) {
    const double radius = grid.spacing();
    struct Candidate {
        double dist;
        std::size_t est;
        std::size_t truth;
    };
    std::vector<Candidate> candidates;
    for (std::size_t e = 0; e < estimates.size(); ++e) {
        TorusPoint est_point(estimates[e].phase);
        for (std::size_t k = 0; k < truth.count(); ++k) {
            double d = torus_distance(est_point, TorusPoint(truth.phase(k)));
            if (d <= radius) candidates.push_back(Candidate{d, e, k});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  return std::tie(a.dist, a.est, a.truth) <
                         std::tie(b.dist, b.est, b.truth);
              });

    std::vector<bool> est_used(estimates.size(), false);
    std::vector<bool> truth_used(truth.count(), false);
    double sq_sum = 0.0;
    double err_max = 0.0;
    double rel_max = 0.0;
    std::size_t matched = 0;
    auto freq_of = [&](double phase) {
        double c = std::max(0.0, std::cos(std::numbers::pi * phase / 2.0));
        return std::sqrt(alpha * c) / (2.0 * std::numbers::pi);
    };
    for (const auto& cand : candidates) {
        if (est_used[cand.est] || truth_used[cand.truth]) continue;
        est_used[cand.est] = true;
        truth_used[cand.truth] = true;
        ++matched;
        sq_sum += cand.dist * cand.dist;
        err_max = std::max(err_max, cand.dist);
        double f_true = freq_of(truth.phase(cand.truth));
        double f_est = freq_of(estimates[cand.est].phase);
        if (f_true > 0.0) {
            rel_max = std::max(rel_max, std::fabs(f_est - f_true) / f_true);
        }
    }

    MatchScore score;
    score.matched = matched;
    score.spurious = estimates.size() - matched;
    score.undetected = truth.count() - matched;
    score.phase_rmse = matched > 0 ? std::sqrt(sq_sum / static_cast<double>(matched)) : 0.0;
    score.phase_err_max = err_max;
    score.freq_rel_max = rel_max;
    return score;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    FemModel model = build_cantilever(config.beam);
    StandardProblem problem = standardize(model);
    SeparationReport sep = min_gap(problem.spectrum);

    int bits = config.ancilla_bits > 0 ? config.ancilla_bits : sep.min_ancilla_bits;
    PhaseGrid grid(bits);
    if (!sep.satisfies_3_over_n(grid)) {
        throw MinGapGateError(
            "separation gate: 3/N >= min adjacent gap; need at least n = " +
                std::to_string(sep.min_ancilla_bits),
            sep.min_ancilla_bits);
    }

    ExperimentReport report;
    report.m0 = problem.m0;
    report.target_modes = problem.m0;
    report.ancilla_bits = bits;
    report.grid_size = grid.size();
    report.min_phase_gap = sep.min_gap;
    report.alpha = problem.alpha;
    report.plan = shot_bound(problem.m0, grid, config.delta);
    report.baseline_shots = report.plan.suggested_shots;

    const double r = static_cast<double>(problem.m0);
    for (double fraction : config.shot_fractions) {
        auto shots = static_cast<std::uint64_t>(
            std::llround(fraction * static_cast<double>(report.baseline_shots)));
        for (std::uint64_t seed : config.seeds) {
            auto start = std::chrono::steady_clock::now();
            ShotStream rng(seed);
            EmpiricalDistribution empirical =
                config.sampler == ExperimentConfig::SamplerKind::TwoStage
                    ? two_stage_sample(problem, grid, shots, rng, config.threads)
                    : sample_rejection(problem.spectrum,
                                       ModeWeights::uniform(problem.m0), grid, shots,
                                       rng, config.threads);

            DetectionSet detected = detect_empirical(empirical, problem.m0);
            std::vector<PhaseEstimate> estimates = estimate_phases(detected, empirical);

            TrialResult trial;
            trial.fraction = fraction;
            trial.seed = seed;
            trial.shots = shots;
            trial.detected = estimates.size();
            trial.detection_rate = static_cast<double>(estimates.size()) / r;
            trial.score = match_and_score(estimates, problem.spectrum, grid,
                                          problem.alpha);
            trial.anomalous_runs = static_cast<std::size_t>(
                std::count_if(estimates.begin(), estimates.end(),
                              [](const PhaseEstimate& e) { return e.from_anomalous_run; }));
            trial.properties = check_sample_theorem(detected, problem.spectrum, grid);
            trial.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            report.trials.push_back(std::move(trial));
        }
    }
    return report;
}

void ExperimentReport::write_csv(std::ostream& out) const {
    out << "fraction,seed,shots,detected,target,detection_rate,phase_rmse,"
           "freq_rel_max,spurious,anomalous_runs,properties_pass,runtime_s\n";
    for (const auto& t : trials) {
        out << t.fraction << ',' << t.seed << ',' << t.shots << ',' << t.detected
            << ',' << target_modes << ',' << t.detection_rate << ','
            << t.score.phase_rmse << ',' << t.score.freq_rel_max << ','
            << t.score.spurious << ',' << t.anomalous_runs << ','
            << (t.properties.all_pass() ? 1 : 0) << ',' << t.runtime_seconds << '\n';
    }
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["m0"] = m0;
    j["target_modes"] = target_modes;
    j["ancilla_bits"] = ancilla_bits;
    j["grid_size"] = grid_size;
    j["min_phase_gap"] = min_phase_gap;
    j["alpha"] = alpha;
    j["shot_bound"] = plan.shot_bound;
    j["baseline_shots"] = baseline_shots;
    j["epsilon"] = plan.epsilon;
    j["delta"] = plan.delta;
    nlohmann::json trials_json = nlohmann::json::array();
    for (const auto& t : trials) {
        nlohmann::json tj;
        tj["fraction"] = t.fraction;
        tj["seed"] = t.seed;
        tj["shots"] = t.shots;
        tj["detected"] = t.detected;
        tj["detection_rate"] = t.detection_rate;
        tj["matched"] = t.score.matched;
        tj["spurious"] = t.score.spurious;
        tj["undetected"] = t.score.undetected;
        tj["phase_rmse"] = t.score.phase_rmse;
        tj["freq_rel_max"] = t.score.freq_rel_max;
        tj["anomalous_runs"] = t.anomalous_runs;
        tj["properties_pass"] = t.properties.all_pass();
        tj["runtime_seconds"] = t.runtime_seconds;
        trials_json.push_back(tj);
    }
    j["trials"] = trials_json;
    return j.dump(2);
}

}  // namespace saqpe
