#pragma once

#include <cstdint>
#include <vector>

namespace saqpe {

/// A point on the torus T = R/Z, stored reduced to [0, 1).
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(double v) : value_(reduce(v)) {}

    double value() const { return value_; }

    /// Reduce any real to [0, 1).
    static double reduce(double v);

private:
    double value_ = 0.0;
};

/// Wrap-around distance |x - y|_T = min_k |x - y - k|, in [0, 1/2].
double torus_distance(TorusPoint x, TorusPoint y);

/// The dyadic measurement grid A_N with N = 2^n points a_j = j/N.
/// Grid points are exact doubles for every supported n (n <= 52).
class PhaseGrid {
public:
    explicit PhaseGrid(int ancilla_bits);

    int ancilla_bits() const { return bits_; }
    std::uint64_t size() const { return size_; }
    double spacing() const { return 1.0 / static_cast<double>(size_); }

    /// a_j for any integer j (wrapped mod N).
    TorusPoint point(std::int64_t j) const;

    /// Index arithmetic mod N.
    std::uint64_t wrap(std::int64_t j) const;

    /// Grid index whose a_j lies immediately at or below x.
    std::uint64_t index_below(TorusPoint x) const;

private:
    int bits_ = 1;
    std::uint64_t size_ = 2;
};

/// Closed interval [center - hw, center + hw] on the torus.
class TorusInterval {
public:
    TorusInterval(TorusPoint center, double half_width);

    TorusPoint center() const { return center_; }
    double half_width() const { return half_width_; }

    bool contains(TorusPoint x) const;

private:
    TorusPoint center_;
    double half_width_ = 0.0;
};

/// All grid indices j with a_j in the interval, in cyclic sweep order
/// (ascending from the interval's lower edge, wrapping through 0 if needed).
/// Requires half_width < 1/2.
std::vector<std::uint64_t> grid_points_in(const TorusInterval& interval,
                                          const PhaseGrid& grid);

}  // namespace saqpe
