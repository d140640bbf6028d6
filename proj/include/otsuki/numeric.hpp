#pragma once

#include <cmath>
#include <numbers>

namespace otsuki {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;

/// sin(x)/x, accurate near zero.
inline double sinc(double x)
{
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

/// Half-period of the Clifford torus geodesic, sqrt(2) pi^2.
inline double clifford_half_period() { return std::numbers::sqrt2 * pi * pi; }

/// Rotation angle limit at b -> 0, (sqrt(2)/2) pi.
inline double clifford_rotation_angle() { return std::numbers::sqrt2 * 0.5 * pi; }

} // namespace otsuki
