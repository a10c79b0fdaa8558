#include "saqpe/qpe_dist.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "saqpe/fejer.hpp"

namespace saqpe {

ModeWeights::ModeWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
        throw std::invalid_argument("ModeWeights: needs at least one weight");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw std::invalid_argument("ModeWeights: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("ModeWeights: weights must sum to 1 (1e-12)");
    }
}

ModeWeights ModeWeights::uniform(std::size_t count) {
    if (count == 0) throw std::invalid_argument("ModeWeights: empty");
    return ModeWeights(std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

QpeDistribution::QpeDistribution(Spectrum spectrum, ModeWeights weights, PhaseGrid grid)
    : spectrum_(std::move(spectrum)), weights_(std::move(weights)), grid_(grid) {
    if (weights_.size() != spectrum_.count()) {
        throw std::invalid_argument("QpeDistribution: weight/phase count mismatch");
    }
    if (grid_.size() > kDenseLimit) return;  // lazy mode

    dense_.assign(grid_.size(), 0.0);
    const double n = static_cast<double>(grid_.size());
    for (std::size_t k = 0; k < spectrum_.count(); ++k) {
        double w = weights_[k];
        if (w == 0.0) continue;
        double theta = spectrum_.phase(k);
        for (std::uint64_t j = 0; j < grid_.size(); ++j) {
            dense_[j] += w * fejer_normalized_turns(
                                 grid_.size(), theta - static_cast<double>(j) / n);
        }
    }
}

double QpeDistribution::prob(std::uint64_t bin) const {
    std::uint64_t j = grid_.wrap(static_cast<std::int64_t>(bin));
    if (!dense_.empty()) return dense_[j];
    double a = static_cast<double>(j) / static_cast<double>(grid_.size());
    double p = 0.0;
    for (std::size_t k = 0; k < spectrum_.count(); ++k) {
        double w = weights_[k];
        if (w == 0.0) continue;
        p += w * fejer_normalized_turns(grid_.size(), spectrum_.phase(k) - a);
    }
    return p;
}

const std::vector<double>& QpeDistribution::dense() const {
    if (dense_.empty()) {
        throw std::logic_error("QpeDistribution: grid too large for dense mode");
    }
    return dense_;
}

void QpeDistribution::write_csv(std::ostream& out) const {
    const auto& p = dense();
    out << "j,a_j,p_j\n";
    char buf[96];
    for (std::uint64_t j = 0; j < p.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g\n",
                      static_cast<unsigned long long>(j),
                      static_cast<double>(j) / static_cast<double>(p.size()), p[j]);
        out << buf;
    }
}

QpeDistribution exact_weighted(const Spectrum& spectrum, const ModeWeights& weights,
                               const PhaseGrid& grid) {
    return QpeDistribution(spectrum, weights, grid);
}

QpeDistribution state_averaged(const Spectrum& spectrum, const PhaseGrid& grid) {
    return QpeDistribution(spectrum, ModeWeights::uniform(spectrum.count()), grid);
}

QpeDistribution conditional_on_basis(const StandardProblem& problem, std::size_t j0,
                                     const PhaseGrid& grid) {
    return QpeDistribution(problem.spectrum, ModeWeights(problem.overlap_weights(j0)),
                           grid);
}

}  // namespace saqpe
