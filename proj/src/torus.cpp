#include "saqpe/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace saqpe {

double TorusPoint::reduce(double v) {
    double r = v - std::floor(v);
    // v slightly below an integer can round to exactly 1.0
    return r < 1.0 ? r : 0.0;
}

double torus_distance(TorusPoint x, TorusPoint y) {
    double d = std::fabs(x.value() - y.value());
    return d <= 0.5 ? d : 1.0 - d;
}

PhaseGrid::PhaseGrid(int ancilla_bits) : bits_(ancilla_bits) {
    if (ancilla_bits < 1 || ancilla_bits > 52) {
        throw std::invalid_argument("PhaseGrid: ancilla_bits must be in [1, 52]");
    }
    size_ = std::uint64_t{1} << ancilla_bits;
}

TorusPoint PhaseGrid::point(std::int64_t j) const {
    std::uint64_t w = wrap(j);
    return TorusPoint(static_cast<double>(w) / static_cast<double>(size_));
}

std::uint64_t PhaseGrid::wrap(std::int64_t j) const {
    std::int64_t n = static_cast<std::int64_t>(size_);
    std::int64_t r = j % n;
    return static_cast<std::uint64_t>(r < 0 ? r + n : r);
}

std::uint64_t PhaseGrid::index_below(TorusPoint x) const {
    double scaled = x.value() * static_cast<double>(size_);
    auto j = static_cast<std::uint64_t>(std::floor(scaled));
    return j < size_ ? j : size_ - 1;
}

TorusInterval::TorusInterval(TorusPoint center, double half_width)
    : center_(center), half_width_(half_width) {
    if (!(half_width > 0.0)) {
        throw std::invalid_argument("TorusInterval: half_width must be positive");
    }
}

bool TorusInterval::contains(TorusPoint x) const {
    return torus_distance(center_, x) <= half_width_;
}

std::vector<std::uint64_t> grid_points_in(const TorusInterval& interval,
                                          const PhaseGrid& grid) {
    if (interval.half_width() >= 0.5) {
        throw std::invalid_argument("grid_points_in: half_width must be < 1/2");
    }
    double n = static_cast<double>(grid.size());
    double lo = interval.center().value() - interval.half_width();
    double hi = interval.center().value() + interval.half_width();
    auto first = static_cast<std::int64_t>(std::ceil(lo * n)) - 1;
    auto last = static_cast<std::int64_t>(std::floor(hi * n)) + 1;

    // Sweep one index beyond each edge and re-test membership, so that float
    // rounding in lo*n / hi*n cannot drop a boundary point. The unwrapped
    // real-line window check keeps the margin indices from sneaking in via
    // the far side of the torus.
    constexpr double kEdgeTol = 1e-14;
    std::vector<std::uint64_t> out;
    for (std::int64_t j = first; j <= last; ++j) {
        double unwrapped = static_cast<double>(j) / n;
        if (unwrapped < lo - kEdgeTol || unwrapped > hi + kEdgeTol) continue;
        std::uint64_t w = grid.wrap(j);
        if (!out.empty() && out.front() == w) break;  // wrapped a full turn
        if (interval.contains(grid.point(j))) out.push_back(w);
    }
    return out;
}

}  // namespace saqpe
