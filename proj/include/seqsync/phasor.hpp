#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace seqsync {

/// Complex quantity used for voltages, currents, impedances and coupling
/// coefficients. Per-unit wherever a base applies.
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

/// Magnitude-angle constructor, |z| e^{j angle}.
inline Complex from_polar(double magnitude, double angle_rad)
{
    return std::polar(magnitude, angle_rad);
}

inline double magnitude(Complex z) { return std::abs(z); }

/// Angle of z in (-pi, pi]; the angle of zero is 0.
inline double angle(Complex z)
{
    if (z == Complex{}) {
        return 0.0;
    }
    return normalize_angle(std::arg(z));
}

/// e^{j a}
inline Complex unit(double a) { return {std::cos(a), std::sin(a)}; }

} // namespace seqsync
