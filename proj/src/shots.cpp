#include "saqpe/shots.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "saqpe/detection.hpp"

namespace saqpe {

double kl_plus(double x, double a) {
    if (a < 0.0 || a >= 1.0 / 3.0) {
        throw std::domain_error("kl_plus: requires 0 <= a < 1/3");
    }
    if (!(x > 0.0 && x < 1.0 - a)) {
        throw std::domain_error("kl_plus: requires 0 < x < 1 - a");
    }
    if (a == 0.0) return 0.0;
    return (x + a) * std::log((x + a) / x) +
           (1.0 - x - a) * std::log((1.0 - x - a) / (1.0 - x));
}

double kl_minus(double x, double a) {
    if (a < 0.0 || a >= 1.0 / 3.0) {
        throw std::domain_error("kl_minus: requires 0 <= a < 1/3");
    }
    if (!(x > a && x < 1.0)) {
        throw std::domain_error("kl_minus: requires a < x < 1");
    }
    if (a == 0.0) return 0.0;
    return (x - a) * std::log((x - a) / x) +
           (1.0 - x + a) * std::log((1.0 - x + a) / (1.0 - x));
}

double epsilon_max(std::size_t m_eff, const PhaseGrid& grid) {
    if (m_eff == 0) throw std::invalid_argument("epsilon_max: m_eff must be positive");
    DetectionConstants c = detection_constants(grid);
    double eps = (c.tau - c.sigma) / 2.0 -
                 static_cast<double>(m_eff) * c.d_n / 2.0;
    if (!(eps > 0.0)) {
        throw std::invalid_argument("epsilon_max: nonpositive margin for this M, N");
    }
    return eps;
}

namespace {

void check_plan_preconditions(std::size_t m_eff, const PhaseGrid& grid, double delta,
                              double epsilon) {
    if (m_eff < 3) {
        throw std::invalid_argument("shot_bound: requires M >= 3");
    }
    if (grid.size() < 4 * m_eff) {
        throw std::invalid_argument("shot_bound: requires N >= 4M");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("shot_bound: delta must be in (0, 1)");
    }
    double cap = epsilon_max(m_eff, grid);
    if (!(epsilon > 0.0) || epsilon > cap * (1.0 + 1e-12)) {
        throw std::invalid_argument("shot_bound: epsilon must be in (0, epsilon_max]");
    }
}

}  // namespace

ShotPlan shot_bound(std::size_t m_eff, const PhaseGrid& grid, double delta,
                    double epsilon) {
    check_plan_preconditions(m_eff, grid, delta, epsilon);
    DetectionConstants c = detection_constants(grid);
    const double m = static_cast<double>(m_eff);
    const double n = static_cast<double>(grid.size());
    const double x = c.gamma / m + c.d_n;
    const double a = epsilon / m;

    double h_plus = kl_plus(x, a);
    double k_real = std::log((n + m) / delta) / h_plus;
    auto k_bound = static_cast<std::uint64_t>(std::ceil(k_real));

    ShotPlan plan;
    plan.m_eff = m_eff;
    plan.ancilla_bits = grid.ancilla_bits();
    plan.grid_size = grid.size();
    plan.delta = delta;
    plan.epsilon = epsilon;
    plan.shot_bound = k_bound;
    plan.suggested_shots = (k_bound + 9999) / 10000 * 10000;
    double kd = static_cast<double>(k_bound);
    plan.peak_miss_term = 2.0 * m * std::exp(-kd * kl_minus(x, a));
    plan.false_positive_term = (n - m) * std::exp(-kd * h_plus);
    return plan;
}

ShotPlan shot_bound(std::size_t m_eff, const PhaseGrid& grid, double delta) {
    return shot_bound(m_eff, grid, delta, epsilon_max(m_eff, grid));
}

FailureBound failure_bound(std::uint64_t shots, std::size_t m_eff,
                           const PhaseGrid& grid, double epsilon) {
    check_plan_preconditions(m_eff, grid, 0.5, epsilon);
    DetectionConstants c = detection_constants(grid);
    const double m = static_cast<double>(m_eff);
    const double n = static_cast<double>(grid.size());
    const double x = c.gamma / m + c.d_n;
    const double a = epsilon / m;
    const double k = static_cast<double>(shots);

    FailureBound out;
    double miss = 2.0 * m * std::exp(-k * kl_minus(x, a));
    double fp = (n - m) * std::exp(-k * kl_plus(x, a));
    out.two_term = std::min(1.0, miss + fp);
    out.coarse = std::min(1.0, (n + m) * std::exp(-k * kl_plus(x, a)));
    return out;
}

std::string ShotPlan::to_json() const {
    nlohmann::json j;
    j["m_eff"] = m_eff;
    j["ancilla_bits"] = ancilla_bits;
    j["grid_size"] = grid_size;
    j["delta"] = delta;
    j["epsilon"] = epsilon;
    j["shot_bound"] = shot_bound;
    j["suggested_shots"] = suggested_shots;
    j["peak_miss_term"] = peak_miss_term;
    j["false_positive_term"] = false_positive_term;
    return j.dump(2);
}

}  // namespace saqpe
