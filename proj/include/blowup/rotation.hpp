#pragma once

#include <cmath>

namespace blowup {

/// Lift-average estimate (F^iters(y0) - y0) / iters of the rotation number.
///
/// `lift` must be a degree-one lift evaluated on [0,1); integer parts are
/// carried separately so the iterate never leaves the unit interval.
template <class Lift>
double rotation_number(Lift&& lift, long iters, double y0 = 0.0) {
    if (iters <= 0) return 0.0;
    double w = y0 - std::floor(y0);
    double turns = std::floor(y0);
    for (long i = 0; i < iters; ++i) {
        double l = lift(w);
        double fl = std::floor(l);
        turns += fl;
        w = l - fl;
    }
    return (turns + w - y0) / static_cast<double>(iters);
}

}  // namespace blowup
