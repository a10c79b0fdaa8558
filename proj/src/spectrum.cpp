#include "saqpe/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace saqpe {

namespace {
constexpr double kPi = std::numbers::pi;

void validate_sorted(const std::vector<double>& phases) {
    if (phases.empty()) {
        throw std::invalid_argument("Spectrum: needs at least one phase");
    }
    for (std::size_t k = 0; k < phases.size(); ++k) {
        if (!(phases[k] >= 0.0) || phases[k] >= 1.0) {
            throw std::invalid_argument("Spectrum: phases must lie in [0, 1)");
        }
        if (k > 0 && phases[k] - phases[k - 1] < kDistinctPhaseTol) {
            throw std::invalid_argument(
                "Spectrum: phases must be distinct (within 1e-15) and increasing");
        }
    }
    // wrap pair is adjacent on the torus too
    if (phases.size() > 1 &&
        (phases.front() + 1.0) - phases.back() < kDistinctPhaseTol) {
        throw std::invalid_argument("Spectrum: wrap-adjacent phases collide");
    }
}

std::string format_17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

Spectrum Spectrum::from_sorted(std::vector<double> phases) {
    validate_sorted(phases);
    return Spectrum(std::move(phases));
}

Spectrum Spectrum::from_values(std::vector<double> phases) {
    std::sort(phases.begin(), phases.end());
    return from_sorted(std::move(phases));
}

std::string Spectrum::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (double p : phases_) arr.push_back(format_17(p));
    return arr.dump();
}

Spectrum Spectrum::from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) {
        throw std::invalid_argument("Spectrum::from_json: expected a JSON array");
    }
    std::vector<double> phases;
    phases.reserve(arr.size());
    for (const auto& item : arr) {
        if (item.is_string()) {
            phases.push_back(std::stod(item.get<std::string>()));
        } else {
            phases.push_back(item.get<double>());
        }
    }
    return from_sorted(std::move(phases));
}

SeparationReport min_gap(const Spectrum& spectrum) {
    if (spectrum.count() < 2) {
        throw std::invalid_argument("min_gap: needs at least two phases");
    }
    const auto& p = spectrum.phases();
    double gap = torus_distance(TorusPoint(p.front()), TorusPoint(p.back()));
    for (std::size_t k = 1; k < p.size(); ++k) {
        gap = std::min(gap, torus_distance(TorusPoint(p[k - 1]), TorusPoint(p[k])));
    }
    SeparationReport report;
    report.min_gap = gap;
    int n = 1;
    while (n < 52 && 3.0 / static_cast<double>(std::uint64_t{1} << n) >= gap) ++n;
    report.min_ancilla_bits = n;
    report.min_grid_size = std::uint64_t{1} << n;
    return report;
}

PhaseMapping phases_from_eigenvalues(const std::vector<double>& eigenvalues) {
    constexpr double kClampEps = 1e-12;
    constexpr double kEdgeSlack = 1e-9;
    std::vector<double> phases;
    phases.reserve(eigenvalues.size());
    std::vector<std::size_t> clamped;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        double lambda = eigenvalues[k];
        if (lambda <= 0.0 || lambda >= 1.0 - kClampEps) {
            if (lambda < -kEdgeSlack || lambda > 1.0 + kEdgeSlack) {
                throw std::invalid_argument(
                    "phases_from_eigenvalues: eigenvalue outside (0, 1)");
            }
            lambda = std::clamp(lambda, kClampEps, 1.0 - kClampEps);
            clamped.push_back(k);
        }
        phases.push_back(2.0 * std::acos(lambda) / kPi);
    }
    return PhaseMapping{Spectrum::from_values(std::move(phases)), std::move(clamped)};
}

double eigenvalue_from_phase(double phase) {
    return std::cos(kPi * phase / 2.0);
}

Spectrum synthetic_spectrum(std::size_t count, const PhaseGrid& grid,
                            double min_sep_bins, std::uint64_t seed) {
    if (count == 0) {
        throw std::invalid_argument("synthetic_spectrum: count must be positive");
    }
    if (min_sep_bins < 3.0) {
        throw std::invalid_argument("synthetic_spectrum: min_sep_bins must be >= 3");
    }
    if (grid.size() < 4 * count) {
        throw std::invalid_argument("synthetic_spectrum: requires N >= 4r");
    }
    double n = static_cast<double>(grid.size());
    double floor_gap = min_sep_bins / n;
    double slack = 1.0 - static_cast<double>(count) * floor_gap;
    if (slack <= 0.0) {
        throw std::invalid_argument("synthetic_spectrum: infeasible packing");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (count == 1) {
        return Spectrum::from_values({unit(rng)});
    }

    // Stick breaking: gaps = floor + slack * (normalized exponential sticks),
    // placed from a uniform random anchor.
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> sticks(count);
    double total = 0.0;
    for (auto& s : sticks) {
        s = expo(rng);
        total += s;
    }
    double anchor = unit(rng);
    std::vector<double> phases(count);
    double pos = anchor;
    for (std::size_t k = 0; k < count; ++k) {
        phases[k] = TorusPoint::reduce(pos);
        pos += floor_gap + slack * sticks[k] / total;
    }
    return Spectrum::from_values(std::move(phases));
}

}  // namespace saqpe
