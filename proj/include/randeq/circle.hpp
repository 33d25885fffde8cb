// circle.hpp -- geometry of the unit circle R/Z with arc-length metric.
//
// Points live in [0,1). Distances are arc distances, so diam = 1/2.

#pragma once

#include <cmath>

namespace randeq {

// Circle has circumference 1; antipodal points realize the diameter.
inline constexpr double kCircleDiameter = 0.5;

// Reduce a real number mod 1 into [0,1).
inline double wrap01(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? y - 1.0 : y;   // guard x = -tiny rounding to 1.0
}

// Arc distance between two circle points.
inline double circle_dist(double x, double y) {
    double d = std::fabs(wrap01(x) - wrap01(y));
    return (d > 0.5) ? 1.0 - d : d;
}

// Signed displacement from x to y along the shorter arc, in (-1/2, 1/2].
inline double circle_delta(double x, double y) {
    double d = wrap01(y) - wrap01(x);
    if (d > 0.5) d -= 1.0;
    if (d <= -0.5) d += 1.0;
    return d;
}

} // namespace randeq
