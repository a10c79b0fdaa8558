#pragma once

#include <cstdint>

namespace saqpe {

/// Normalized Fejér kernel F_N(x)/F_N(0) = sin^2(Nx/2) / (N^2 sin^2(x/2)),
/// with the removable singularity at x = 0 mod 2pi evaluating to 1.
/// Even, 2pi-periodic, values in [0, 1]. x is in radians.
///
/// Internally the reduction is done in turns (x / 2pi) so that the numerator
/// keeps full precision even for N ~ 2^27, where N*x/2 is a huge angle.
double fejer_normalized(std::uint64_t n_points, double x_radians);

/// Same kernel evaluated at an offset given in turns (x = 2pi * t). This is
/// the form the QPE distribution uses: offset t = theta - a_j.
double fejer_normalized_turns(std::uint64_t n_points, double offset_turns);

/// Band bound on the normalized kernel over [2k*pi/N, 2(k+1)*pi/N]:
///   1/(k^2 pi^2) + (1 - 4/pi^2)/N^2.
/// Valid for N >= 4 and 1 <= k <= floor(N/2) - 1; throws otherwise.
double sidelobe_bound(std::uint64_t n_points, std::uint64_t band);

}  // namespace saqpe
