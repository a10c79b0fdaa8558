#include "saqpe/fejer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace saqpe {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double fejer_normalized_turns(std::uint64_t n_points, double offset_turns) {
    double n = static_cast<double>(n_points);
    // sin(pi*t) with t reduced to [-1/2, 1/2]; squaring kills the parity sign.
    double td = offset_turns - std::round(offset_turns);
    double den = std::sin(kPi * td);
    if (den == 0.0) return 1.0;
    double z = n * offset_turns;
    double tn = z - std::round(z);
    double num = std::sin(kPi * tn);
    double r = num / (n * den);
    double v = r * r;
    return v <= 1.0 ? v : 1.0;
}

double fejer_normalized(std::uint64_t n_points, double x_radians) {
    if (n_points < 2) {
        throw std::invalid_argument("fejer_normalized: N must be >= 2");
    }
    return fejer_normalized_turns(n_points, x_radians / kTwoPi);
}

double sidelobe_bound(std::uint64_t n_points, std::uint64_t band) {
    if (n_points < 4) {
        throw std::invalid_argument("sidelobe_bound: N must be >= 4");
    }
    if (band < 1 || band > n_points / 2 - 1) {
        throw std::invalid_argument("sidelobe_bound: k must be in [1, N/2 - 1]");
    }
    double n = static_cast<double>(n_points);
    double k = static_cast<double>(band);
    return 1.0 / (k * k * kPi * kPi) + (1.0 - 4.0 / (kPi * kPi)) / (n * n);
}

}  // namespace saqpe
