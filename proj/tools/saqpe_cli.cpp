// Command-line front end: exact distributions, shot sampling, detection,
// shot-count planning, FEM model construction, and the two cantilever
// experiments, all driven from files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "saqpe/detection.hpp"
#include "saqpe/fem.hpp"
#include "saqpe/harness.hpp"
#include "saqpe/oracle.hpp"
#include "saqpe/qpe_dist.hpp"
#include "saqpe/sampler.hpp"
#include "saqpe/shots.hpp"
#include "saqpe/spectrum.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int run_experiment_command(const std::string& config_path, const std::string& out_dir,
                           saqpe::ExperimentConfig preset) {
    saqpe::ExperimentConfig cfg = preset;
    if (!config_path.empty()) {
        cfg = saqpe::ExperimentConfig::from_json(read_file(config_path));
    }
    std::filesystem::create_directories(out_dir);
    saqpe::ExperimentReport report = saqpe::run_experiment(cfg);

    write_file(out_dir + "/config.json", cfg.to_json());
    write_file(out_dir + "/report.json", report.to_json());
    std::ofstream csv(out_dir + "/report.csv");
    report.write_csv(csv);

    std::cout << "m0 = " << report.m0 << ", n = " << report.ancilla_bits
              << ", shot bound = " << report.plan.shot_bound
              << ", baseline K = " << report.baseline_shots << "\n";
    for (const auto& t : report.trials) {
        std::cout << "fraction " << t.fraction << " seed " << t.seed << ": "
                  << t.detected << "/" << report.target_modes << " detected, rmse "
                  << t.score.phase_rmse << ", freq rel max " << t.score.freq_rel_max
                  << (t.properties.all_pass() ? "" : "  [property check failed]")
                  << "\n";
    }
    std::cout << "wrote " << out_dir << "/report.{csv,json}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"state-averaged QPE laboratory"};
    app.require_subcommand(1);

    // --- shot-bound ---------------------------------------------------------
    auto* sb = app.add_subcommand("shot-bound", "sufficient shot count for full detection");
    std::size_t sb_m0 = 1008;
    int sb_n = 27;
    double sb_delta = 0.001;
    double sb_epsilon = 0.0;
    sb->add_option("--m0", sb_m0, "effective mode count")->required();
    sb->add_option("--n", sb_n, "ancilla bits")->required();
    sb->add_option("--delta", sb_delta, "failure probability budget")->required();
    sb->add_option("--epsilon", sb_epsilon, "detection margin (default: epsilon_max)");
    sb->callback([&]() {
        saqpe::PhaseGrid grid(sb_n);
        saqpe::ShotPlan plan = sb_epsilon > 0.0
                                   ? saqpe::shot_bound(sb_m0, grid, sb_delta, sb_epsilon)
                                   : saqpe::shot_bound(sb_m0, grid, sb_delta);
        std::cout << plan.to_json() << "\n";
    });

    // --- fem-build ----------------------------------------------------------
    auto* fb = app.add_subcommand("fem-build", "assemble the cantilever model");
    saqpe::BeamConfig beam;
    std::string fb_out = "fem_out";
    fb->add_option("--length", beam.length_mm, "beam length (mm)");
    fb->add_option("--width", beam.width_mm, "beam width (mm)");
    fb->add_option("--height", beam.height_mm, "beam height (mm)");
    fb->add_option("--nx", beam.nx, "elements along length");
    fb->add_option("--ny", beam.ny, "elements along width");
    fb->add_option("--nz", beam.nz, "elements along height");
    fb->add_option("--youngs", beam.youngs_mpa, "Young's modulus (MPa)");
    fb->add_option("--poisson", beam.poisson, "Poisson ratio");
    fb->add_option("--density", beam.density_tonne_mm3, "density (tonne/mm^3)");
    fb->add_option("--out", fb_out, "output directory")->required();
    fb->callback([&]() {
        std::filesystem::create_directories(fb_out);
        saqpe::FemModel model = saqpe::build_cantilever(beam);
        saqpe::StandardProblem problem = saqpe::standardize(model);
        std::ofstream kfile(fb_out + "/stiffness.coo");
        saqpe::write_stiffness_coordinate(model, kfile);
        std::ofstream mfile(fb_out + "/mass_diagonal.txt");
        saqpe::write_mass_diagonal(model, mfile);
        write_file(fb_out + "/manifest.json",
                   saqpe::model_manifest_json(beam, model, problem));
        write_file(fb_out + "/spectrum.json", problem.spectrum.to_json());
        std::cout << "m0 = " << model.free_dof_count << ", alpha = " << problem.alpha
                  << ", wrote " << fb_out << "/{stiffness.coo,mass_diagonal.txt,"
                  << "manifest.json,spectrum.json}\n";
    });

    // --- simulate -----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate",
                                   "exact distribution and/or sampled shots for a spectrum");
    std::string sim_spectrum;
    std::string sim_weights;
    int sim_n = 10;
    std::uint64_t sim_shots = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "simulate_out";
    sim->add_option("--spectrum", sim_spectrum, "spectrum JSON file")->required();
    sim->add_option("--n", sim_n, "ancilla bits")->required();
    sim->add_option("--weights", sim_weights, "JSON array of mode weights (default uniform)");
    sim->add_option("--shots", sim_shots, "also sample this many shots");
    sim->add_option("--seed", sim_seed, "sampling seed");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->callback([&]() {
        std::filesystem::create_directories(sim_out);
        saqpe::Spectrum spectrum = saqpe::Spectrum::from_json(read_file(sim_spectrum));
        saqpe::PhaseGrid grid(sim_n);
        saqpe::ModeWeights weights = saqpe::ModeWeights::uniform(spectrum.count());
        if (!sim_weights.empty()) {
            auto arr = nlohmann::json::parse(read_file(sim_weights));
            weights = saqpe::ModeWeights(arr.get<std::vector<double>>());
        }
        if (grid.size() <= saqpe::QpeDistribution::kDenseLimit) {
            saqpe::QpeDistribution dist = saqpe::exact_weighted(spectrum, weights, grid);
            std::ofstream csv(sim_out + "/exact.csv");
            dist.write_csv(csv);
            std::cout << "wrote " << sim_out << "/exact.csv\n";
        } else {
            std::cout << "grid too large for a dense export; skipping exact.csv\n";
        }
        if (sim_shots > 0) {
            saqpe::ShotStream rng(sim_seed);
            saqpe::EmpiricalDistribution emp =
                saqpe::sample_rejection(spectrum, weights, grid, sim_shots, rng);
            std::ofstream csv(sim_out + "/empirical.csv");
            emp.write_csv(csv);
            std::cout << "wrote " << sim_out << "/empirical.csv (" << sim_shots
                      << " shots)\n";
        }
    });

    // --- detect -------------------------------------------------------------
    auto* det = app.add_subcommand("detect", "threshold detection on an empirical CSV");
    std::string det_csv;
    std::size_t det_m0 = 0;
    int det_n = 0;
    std::string det_truth;
    double det_alpha = 0.0;
    std::string det_out = "detection.json";
    det->add_option("--empirical", det_csv, "empirical CSV (j,count,p_hat)")->required();
    det->add_option("--m0", det_m0, "effective mode count")->required();
    det->add_option("--n", det_n, "ancilla bits of the grid")->required();
    det->add_option("--spectrum", det_truth, "known spectrum JSON for property checks");
    det->add_option("--alpha", det_alpha, "scaling factor for frequency recovery");
    det->add_option("--out", det_out, "report JSON path");
    det->callback([&]() {
        saqpe::PhaseGrid grid(det_n);
        std::ifstream in(det_csv);
        if (!in) throw std::runtime_error("cannot open " + det_csv);
        saqpe::EmpiricalDistribution emp =
            saqpe::EmpiricalDistribution::read_csv(in, grid);
        saqpe::DetectionSet detected = saqpe::detect_empirical(emp, det_m0);
        auto estimates = saqpe::estimate_phases(detected, emp);

        saqpe::FrequencyRecovery freqs;
        saqpe::FrequencyRecovery* freqs_ptr = nullptr;
        if (det_alpha > 0.0) {
            freqs = saqpe::recover_frequencies(estimates, det_alpha);
            freqs_ptr = &freqs;
        }
        saqpe::SampleTheoremReport props;
        saqpe::SampleTheoremReport* props_ptr = nullptr;
        if (!det_truth.empty()) {
            saqpe::Spectrum truth = saqpe::Spectrum::from_json(read_file(det_truth));
            props = saqpe::check_sample_theorem(detected, truth, grid);
            props_ptr = &props;
        }
        write_file(det_out,
                   saqpe::detection_report_json(detected, estimates, freqs_ptr,
                                                saqpe::detection_constants(grid),
                                                props_ptr));
        std::cout << detected.bins.size() << " bins over threshold, "
                  << estimates.size() << " phase estimates; wrote " << det_out << "\n";
        if (props_ptr != nullptr && !props.all_pass()) {
            std::cout << "property check failed\n";
        }
    });

    // --- oracle-check -------------------------------------------------------
    auto* oc = app.add_subcommand("oracle-check",
                                  "statevector QPE circuit vs the closed-form distribution");
    int oc_trials = 50;
    std::uint64_t oc_seed = 12345;
    oc->add_option("--trials", oc_trials, "random instances");
    oc->add_option("--seed", oc_seed, "base seed");
    oc->callback([&]() {
        saqpe::ShotStream seeds(oc_seed);
        double worst = 0.0;
        for (int t = 0; t < oc_trials; ++t) {
            std::uint64_t s = seeds.next_u64();
            std::size_t dim = 2 + s % 7;       // 2..8
            int bits = 2 + (s >> 8) % 5;       // 2..6
            saqpe::SmallUnitary u = saqpe::SmallUnitary::random(dim, s);
            auto sys = saqpe::unitary_eigensystem(u);

            saqpe::ShotStream amp(oc_seed, 1 + static_cast<std::uint64_t>(t));
            Eigen::VectorXcd init(static_cast<Eigen::Index>(dim));
            for (Eigen::Index i = 0; i < init.size(); ++i) {
                init(i) = std::complex<double>(amp.next_unit() - 0.5,
                                               amp.next_unit() - 0.5);
            }
            init.normalize();

            std::vector<std::pair<double, double>> modes;  // phase, weight
            for (std::size_t k = 0; k < dim; ++k) {
                double w = std::norm(sys.eigenvectors.col(static_cast<Eigen::Index>(k))
                                         .dot(init));
                modes.emplace_back(sys.phases[k], w);
            }
            std::sort(modes.begin(), modes.end());
            std::vector<double> phases, weights;
            for (auto& [p, w] : modes) {
                phases.push_back(p);
                weights.push_back(w);
            }
            saqpe::PhaseGrid grid(bits);
            saqpe::QpeDistribution expected = saqpe::exact_weighted(
                saqpe::Spectrum::from_sorted(phases), saqpe::ModeWeights(weights), grid);
            auto circuit = saqpe::qpe_circuit_probabilities(u, init, bits);
            for (std::uint64_t j = 0; j < grid.size(); ++j) {
                worst = std::max(worst, std::fabs(circuit[j] - expected.prob(j)));
            }
        }
        std::cout << "max |circuit - closed form| over " << oc_trials
                  << " instances: " << worst << "\n";
        if (worst >= 1e-10) throw std::runtime_error("oracle deviation >= 1e-10");
    });

    // --- experiments ----------------------------------------------------------
    std::string e1_config, e1_out = "experiment1_out";
    auto* e1 = app.add_subcommand("experiment1", "full-detection run at theorem shot counts");
    e1->add_option("--config", e1_config, "experiment config JSON (default: paper-style)");
    e1->add_option("--out", e1_out, "output directory")->required();
    e1->callback([&]() {
        run_experiment_command(e1_config, e1_out, saqpe::ExperimentConfig::experiment1());
    });

    std::string e2_config, e2_out = "experiment2_out";
    auto* e2 = app.add_subcommand("experiment2", "critical shot count sweep");
    e2->add_option("--config", e2_config, "experiment config JSON (default: paper-style)");
    e2->add_option("--out", e2_out, "output directory")->required();
    e2->callback([&]() {
        run_experiment_command(e2_config, e2_out, saqpe::ExperimentConfig::experiment2());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const saqpe::MinGapGateError& e) {
        std::cerr << "gate failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
