#pragma once

#include <cmath>
#include <functional>

#include "blowup/base.hpp"
#include "blowup/errors.hpp"

namespace blowup {

/// Piecewise-linear increasing homeomorphism of [0,1] that carries the curve
/// value g_src to g_dst. On the zone |x - g_src| <= half_width it is the
/// contraction x -> g_dst + slope (x - g_src); the two outer pieces are linear
/// and fix 0 and 1.
///
/// All maps come in two forms: plain coordinates and deviations d = x - g from
/// the curve. The deviation form keeps points on the curve exactly on it
/// (d = 0 is preserved), which plain coordinates lose after a few inverse
/// steps of the contraction.
struct FibreMap {
    double slope = 0.5;
    double half_width = 0.4;

    double forward(double g_src, double g_dst, double x) const {
        return g_dst + forward_dev(g_src, g_dst, x - g_src);
    }
    double inverse(double g_src, double g_dst, double y) const {
        return g_src + inverse_dev(g_src, g_dst, y - g_dst);
    }

    double forward_dev(double g_src, double g_dst, double d) const {
        if (std::fabs(d) <= half_width) return slope * d;
        double x = g_src + d;
        double inner = slope * half_width;
        double y;
        if (d < 0.0)
            y = x * ((g_dst - inner) / (g_src - half_width));
        else
            y = 1.0 - (1.0 - x) * ((1.0 - g_dst - inner) / (1.0 - g_src - half_width));
        return y - g_dst;
    }

    double inverse_dev(double g_src, double g_dst, double e) const {
        double inner = slope * half_width;
        if (std::fabs(e) <= inner) return e / slope;
        double y = g_dst + e;
        double x;
        if (e < 0.0)
            x = y * ((g_src - half_width) / (g_dst - inner));
        else
            x = 1.0 - (1.0 - y) * ((1.0 - g_src - half_width) / (1.0 - g_dst - inner));
        return x - g_src;
    }

    /// The outer pieces exist only when the curve keeps the zone inside (0,1).
    bool admits(double g) const { return g - half_width > 0.0 && g + half_width < 1.0; }
};

/// alpha-forced increasing interval map f(theta, x) = (alpha theta, f_theta(x))
/// on Theta x [0,1] with the continuous invariant curve gamma.
template <BaseSystem Base>
struct ForcedIntervalSystem {
    using Point = typename Base::Point;

    Base base;
    std::function<double(const Point&)> gamma;
    FibreMap fibre;

    double forward(const Point& theta, double x) const {
        return fibre.forward(gamma(theta), gamma(base.forward(theta)), x);
    }
    /// f_theta^{-1}(y) for y in the fibre over alpha(theta).
    double inverse(const Point& theta, double y) const {
        return fibre.inverse(gamma(theta), gamma(base.forward(theta)), y);
    }

    /// Throws PreconditionError when gamma leaves the admissible band on `count`
    /// grid points.
    void validate(std::size_t count = 1000) const {
        for (const Point& p : base.grid(count)) {
            if (!fibre.admits(gamma(p)))
                throw PreconditionError("invariant curve leaves the contraction band");
        }
    }
};

/// gamma(theta) = 0.5 + amplitude * (1 - 4 d(theta, 0)), a tent over the circle.
inline double tent_curve(double theta, double amplitude = 0.05) {
    return 0.5 + amplitude * (1.0 - 4.0 * circle_distance(theta, 0.0));
}

inline ForcedIntervalSystem<CircleRotation> default_qpf_system(double omega = golden_mean) {
    return {CircleRotation{omega}, [](const double& t) { return tent_curve(t); }, FibreMap{}};
}

inline ForcedIntervalSystem<TorusTranslation> default_torus_system(TorusTranslation base = {}) {
    return {base,
            [](const TorusTranslation::Point& p) {
                return 0.5 + 0.5 * (tent_curve(p[0]) - 0.5) + 0.5 * (tent_curve(p[1]) - 0.5);
            },
            FibreMap{}};
}

inline ForcedIntervalSystem<Odometer> default_odometer_system() {
    return {Odometer{},
            [](const Odometer::Point& p) { return 0.5 + 0.05 * (2.0 * Odometer::address(p) - 1.0); },
            FibreMap{}};
}

}  // namespace blowup
