#include "doctest.h"

#include <cmath>
#include <sstream>

#include "saqpe/harness.hpp"

using namespace saqpe;

TEST_CASE("match and score") {
    PhaseGrid g(6);
    auto truth = Spectrum::from_values({0.1, 0.5, 0.9});
    SUBCASE("perfect estimates") {
        std::vector<PhaseEstimate> est;
        for (double p : truth.phases()) {
            est.push_back({p, {0}, EstimationRule::Single, false});
        }
        auto score = match_and_score(est, truth, g, 1.0);
        CHECK(score.matched == 3);
        CHECK(score.spurious == 0);
        CHECK(score.undetected == 0);
        CHECK(score.phase_rmse == 0.0);
        CHECK(score.freq_rel_max == 0.0);
    }
    SUBCASE("one missing, one displaced") {
        double shift = 1.0 / 128.0;  // half a bin
        std::vector<PhaseEstimate> est = {
            {0.1 + shift, {0}, EstimationRule::Single, false},
            {0.5, {0}, EstimationRule::Single, false}};
        auto score = match_and_score(est, truth, g, 1.0);
        CHECK(score.matched == 2);
        CHECK(score.undetected == 1);
        CHECK(score.phase_rmse ==
              doctest::Approx(shift / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(score.phase_err_max == doctest::Approx(shift).epsilon(1e-12));
    }
    SUBCASE("far estimates count as spurious") {
        std::vector<PhaseEstimate> est = {{0.3, {0}, EstimationRule::Single, false}};
        auto score = match_and_score(est, truth, g, 1.0);
        CHECK(score.matched == 0);
        CHECK(score.spurious == 1);
        CHECK(score.undetected == 3);
    }
}

TEST_CASE("config json round trip") {
    auto cfg = ExperimentConfig::experiment2();
    cfg.beam.nx = 7;
    cfg.delta = 0.01;
    cfg.threads = 2;
    auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.beam.nx == 7);
    CHECK(back.delta == 0.01);
    CHECK(back.shot_fractions == cfg.shot_fractions);
    CHECK(back.seeds == cfg.seeds);
    CHECK(back.threads == 2);
    CHECK(back.sampler == cfg.sampler);
}

TEST_CASE("separation gate refuses undersized grids") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.ancilla_bits = 10;  // desk model needs ~17 bits
    cfg.seeds = {1};
    try {
        run_experiment(cfg);
        FAIL("expected MinGapGateError");
    } catch (const MinGapGateError& e) {
        CHECK(e.required_ancilla_bits > 10);
    }
}

TEST_CASE("desk-scale experiment detects every mode") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.seeds = {1};
    auto report = run_experiment(cfg);
    CHECK(report.m0 == 72);
    CHECK(report.grid_size >= 4 * 72);
    CHECK(report.min_phase_gap > 3.0 / static_cast<double>(report.grid_size));
    REQUIRE(report.trials.size() == 1);
    const auto& trial = report.trials[0];
    CHECK(trial.detected == 72);
    CHECK(trial.detection_rate == 1.0);
    CHECK(trial.score.spurious == 0);
    CHECK(trial.score.matched == 72);
    CHECK(trial.properties.all_pass());
    CHECK(trial.score.phase_err_max <=
          0.5 / static_cast<double>(report.grid_size));

    std::ostringstream csv;
    report.write_csv(csv);
    CHECK(csv.str().find("fraction,seed,shots") == 0);
    auto json_text = report.to_json();
    CHECK(json_text.find("\"detected\": 72") != std::string::npos);
}

TEST_CASE("experiment runs are deterministic") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.seeds = {11};
    cfg.shot_fractions = {0.25};
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].detected == b.trials[i].detected);
        CHECK(a.trials[i].score.phase_rmse == b.trials[i].score.phase_rmse);
        CHECK(a.trials[i].score.freq_rel_max == b.trials[i].score.freq_rel_max);
        CHECK(a.trials[i].shots == b.trials[i].shots);
    }
}

TEST_CASE("uniform-rejection sampler gives the same law at full detection") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.seeds = {5};
    cfg.sampler = ExperimentConfig::SamplerKind::UniformRejection;
    auto report = run_experiment(cfg);
    REQUIRE(report.trials.size() == 1);
    CHECK(report.trials[0].detected == 72);
    CHECK(report.trials[0].properties.all_pass());
}
