#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "blowup/base.hpp"
#include "blowup/general.hpp"
#include "blowup/measure.hpp"
#include "blowup/skew.hpp"

namespace blowup {

/// Slow reference for a blown-up system: the fibre measure evaluated straight
/// from its series, one term at a time, each term pulled back through n
/// fibre inverses in plain coordinates. O(N^2) map applications per CDF,
/// sharing nothing with the incremental deviation-coordinate evaluation.
/// Only meaningful on fibres off the blown-up orbit.
template <BaseSystem Base>
class DirectSeries {
public:
    using Point = typename Base::Point;

    explicit DirectSeries(const BlownUpSystem<Base>& sys) : sys_(sys), steps_(bisection_steps(1e-15)) {}

    double mu0(const Point& t, double z) const {
        const auto& p = sys_.pinch();
        if (sys_.base().same(t, p.theta_star)) return z >= sys_.gamma(t) ? 1.0 : 0.0;
        double lo = p.psi(t), hi = p.phi(t);
        return std::clamp((z - lo) / (hi - lo), 0.0, 1.0);
    }

    /// f_theta^{-n}(y), landing in the fibre over alpha^{-n}(theta).
    double pull(const Point& theta, long n, double y) const {
        const auto& forced = sys_.system();
        const Base& base = sys_.base();
        Point t = theta;
        if (n > 0) {
            for (long j = 0; j < n; ++j) {
                t = base.backward(t);
                y = forced.inverse(t, y);
            }
        } else {
            for (long j = 0; j < -n; ++j) {
                y = forced.forward(t, y);
                t = base.forward(t);
            }
        }
        return y;
    }

    double mu_cdf(const Point& theta, double y) const {
        const long N = sys_.truncation();
        if (N < 0) return y;
        double s = 0.0;
        for (long n = -N; n <= N; ++n)
            s += sys_.weights()(n) * mu0(sys_.base().iterate(theta, -n), pull(theta, n, y));
        return s + sys_.weights().lebesgue_coefficient(N) * y;
    }

    double h(const Point& theta, double x) const {
        return bisect_first([&](double y) { return mu_cdf(theta, y) >= x; }, steps_);
    }

    double fhat(const Point& theta, double x) const {
        Point next = sys_.base().forward(theta);
        return mu_cdf(next, sys_.system().forward(theta, h(theta, x)));
    }

private:
    const BlownUpSystem<Base>& sys_;
    int steps_;
};

struct CrossCheck {
    double mu_cdf = 0.0;
    double h = 0.0;
    double fhat = 0.0;
    long evaluations = 0;
    double worst() const { return std::max({mu_cdf, h, fhat}); }
};

/// Compares the system against its direct series on `count` random points of
/// fibres at distance >= 1e-3 from the blown-up orbit.
template <BaseSystem Base>
CrossCheck cross_check_direct(const BlownUpSystem<Base>& sys, long count, std::uint64_t seed) {
    DirectSeries<Base> ref(sys);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CrossCheck c;
    for (long i = 0; i < count; ++i) {
        auto t = detail::generic_point(sys, rng, 1e-3);
        double y = unit(rng), x = unit(rng);
        c.mu_cdf = std::max(c.mu_cdf, std::fabs(sys.mu_cdf(t, y) - ref.mu_cdf(t, y)));
        c.h = std::max(c.h, std::fabs(sys.h_fibre(t, x) - ref.h(t, x)));
        c.fhat = std::max(c.fhat, std::fabs(sys.fhat(t, x).x - ref.fhat(t, x)));
        c.evaluations += 3;
    }
    return c;
}

/// The circle system seen on the torus: curve and pinch functions depend on the
/// first coordinate only, the second coordinate is translated by omega2.
inline BlownUpSystem<TorusTranslation> lift_to_torus(const BlownUpSystem<CircleRotation>& circle,
                                                    double omega2, double star2) {
    using P = TorusTranslation::Point;
    TorusTranslation base{circle.base().omega, omega2};
    auto g = circle.system().gamma;
    ForcedIntervalSystem<TorusTranslation> forced{base, [g](const P& p) { return g(p[0]); },
                                                  circle.system().fibre};
    auto phi = circle.pinch().phi;
    auto psi = circle.pinch().psi;
    PinchFunctions<P> pinch{P{circle.pinch().theta_star, star2}, [phi](const P& p) { return phi(p[0]); },
                            [psi](const P& p) { return psi(p[0]); }, circle.pinch().mode};
    return blowup_general(base, std::move(forced), std::move(pinch), circle.weights(), circle.truncation());
}

/// The lifted torus system against the circle system on random torus points
/// whose first coordinate is generic for the circle.
inline CrossCheck cross_check_lift(const BlownUpSystem<CircleRotation>& circle,
                                   const BlownUpSystem<TorusTranslation>& torus, long count,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CrossCheck c;
    for (long i = 0; i < count; ++i) {
        double t1 = detail::generic_point(circle, rng, 1e-3);
        TorusTranslation::Point t{t1, unit(rng)};
        double y = unit(rng), x = unit(rng);
        c.mu_cdf = std::max(c.mu_cdf, std::fabs(circle.mu_cdf(t1, y) - torus.mu_cdf(t, y)));
        c.h = std::max(c.h, std::fabs(circle.h_fibre(t1, x) - torus.h_fibre(t, x)));
        c.fhat = std::max(c.fhat, std::fabs(circle.fhat(t1, x).x - torus.fhat(t, x).x));
        c.evaluations += 3;
    }
    return c;
}

}  // namespace blowup
