#pragma once

#include <cmath>

namespace blowup {

// Representative of t mod 1 in [0, 1).
inline double wrap01(double t) {
    double r = t - std::floor(t);
    return r >= 1.0 ? 0.0 : r;
}

inline double circle_distance(double a, double b) {
    double d = std::fabs(wrap01(a - b));
    return std::fmin(d, 1.0 - d);
}

// Signed offset of a from b, in [-1/2, 1/2).
inline double circle_offset(double a, double b) {
    double d = wrap01(a - b);
    return d >= 0.5 ? d - 1.0 : d;
}

inline const double golden_mean = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace blowup
