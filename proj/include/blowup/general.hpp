#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "blowup/base.hpp"
#include "blowup/forced.hpp"
#include "blowup/pinch.hpp"
#include "blowup/report.hpp"
#include "blowup/skew.hpp"

namespace blowup {

/// Blow-up over an arbitrary base. `base` replaces the base stored in `system`.
template <BaseSystem Base>
BlownUpSystem<Base> blowup_general(const Base& base, ForcedIntervalSystem<Base> system,
                                   PinchFunctions<typename Base::Point> pinch,
                                   WeightSequence weights, long N) {
    system.base = base;
    return BlownUpSystem<Base>(std::move(system), std::move(pinch), weights, N);
}

/// Points approaching theta* where gamma-plus tends to the top of S_0
/// (phi = gamma) and to its bottom (psi = gamma), nearest last.
template <class Point>
struct ApproachPoints {
    std::vector<Point> upper_side;
    std::vector<Point> lower_side;
};

inline ApproachPoints<double> circle_approach(double theta_star, PinchMode mode, int count = 30) {
    ApproachPoints<double> ap;
    for (int k = 0; k < count; ++k) {
        if (mode == PinchMode::oscillating) {
            // sin(pi log2 u) = -1 puts all of the width below gamma, +1 above;
            // stop before the offsets fall under the fibre-matching tolerance
            if (-3.5 - 2.0 * k < -34.0) break;
            ap.upper_side.push_back(wrap01(theta_star + std::exp2(-2.5 - 2.0 * k)));
            ap.lower_side.push_back(wrap01(theta_star + std::exp2(-3.5 - 2.0 * k)));
        } else {
            ap.upper_side.push_back(wrap01(theta_star - std::ldexp(1.0, -4 - k)));
            ap.lower_side.push_back(wrap01(theta_star + std::ldexp(1.0, -4 - k)));
        }
    }
    return ap;
}

template <class Point>
ApproachPoints<Point> sequence_approach(const PinchSequences<Point>& seq) {
    return {seq.S, seq.T};
}

/// Largest return-time gap recorded for the shipped bases over n <= 1e5.
inline long recorded_return_gap(const std::string& base, double eps) {
    bool coarse = eps >= 0.1;
    if (base == "rotation") return coarse ? 8 : 89;
    if (base == "torus2") return coarse ? 94 : 21769;
    if (base == "odometer") return coarse ? 16 : 128;
    return 0;
}

struct SuiteOptions {
    long fibres = 100;           // fibres for the monotonicity grids
    long grid = 1000;            // points per fibre grid
    long random_points = 10000;  // semiconjugacy / inverse sample
    long segment_reach = 10;     // |n| range for segment checks
    long curve_sample = 1000;    // minimal-set orbit length
    long generic_fibres = 1000;  // fibres for the pinching check
    std::uint64_t seed = 1;
};

namespace detail {

template <BaseSystem Base>
typename Base::Point generic_point(const BlownUpSystem<Base>& sys, std::mt19937_64& rng,
                                   double clearance) {
    for (;;) {
        auto p = sys.base().random_point(rng);
        bool ok = true;
        for (long n = -sys.truncation(); n <= sys.truncation() && ok; ++n)
            ok = sys.base().distance(p, sys.blown_fibre(n)) > clearance;
        if (ok) return p;
    }
}

}  // namespace detail

/// The property suite of a blown-up system: forced-system sanity, base
/// isometry/syndeticity, and the extension itself: monotone fibre maps,
/// segments, discontinuity, semiconjugacy, pinching. Pinching is skipped unless
/// the base is flagged minimal and almost periodic.
template <BaseSystem Base>
void check_blowup_properties(const BlownUpSystem<Base>& sys,
                             const ApproachPoints<typename Base::Point>& approach,
                             const SuiteOptions& opt, VerificationReport& report) {
    using Point = typename Base::Point;
    using Orbit = typename BlownUpSystem<Base>::FibreOrbit;
    const Base& base = sys.base();
    const auto& forced = sys.system();
    const long N = sys.truncation();
    const double tail2 = 2.0 * sys.tail();
    const long reach = std::min(opt.segment_reach, N);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // forced system
    {
        double inv = 0.0, curve = 0.0;
        for (const Point& t : base.grid(1000)) {
            curve = std::max(curve, std::fabs(forced.forward(t, forced.gamma(t)) -
                                              forced.gamma(base.forward(t))));
            for (int i = 0; i <= 20; ++i) {
                double x = i / 20.0;
                inv = std::max(inv, std::fabs(forced.inverse(t, forced.forward(t, x)) - x));
            }
        }
        report.add(at_most("forced.curve_invariance", "f_theta(gamma(theta)) = gamma(alpha theta)", curve, 1e-10));
        report.add(at_most("forced.fibre_inverse", "f_theta^-1 o f_theta = id", inv, 1e-10));
    }

    // pinch ordering psi <= gamma <= phi, psi < phi off theta*
    {
        double worst = 0.0;
        long pinched = 0;
        for (const Point& t : base.grid(1000)) {
            double g = forced.gamma(t), up = sys.pinch().phi(t), lo = sys.pinch().psi(t);
            worst = std::max({worst, lo - g, g - up});
            if (!(lo < up) && !base.same(t, sys.pinch().theta_star)) ++pinched;
            if (!(lo > 0.0 && up < 1.0)) worst = std::max(worst, 1.0);
        }
        report.add(at_most("pinch.ordering", "psi <= gamma <= phi inside (0,1)", worst, 0.0));
        report.add(at_most("pinch.strict_off_star", "psi < phi away from theta*", static_cast<double>(pinched), 0.0));
    }

    // base
    {
        double iso = 0.0;
        for (int i = 0; i < 1000; ++i) {
            Point a = base.random_point(rng), b = base.random_point(rng);
            iso = std::max(iso, std::fabs(base.distance(base.forward(a), base.forward(b)) - base.distance(a, b)));
            if (!base.same(base.backward(base.forward(a)), a)) iso = std::max(iso, 1.0);
        }
        report.add(at_most("base.isometry", "d(alpha x, alpha y) = d(x, y) and alpha^-1 o alpha = id", iso, 1e-12));
        for (double eps : {0.1, 0.01}) {
            long gap = max_return_gap(base, eps, 100000);
            report.add(at_most(eps >= 0.1 ? "base.syndetic_0.1" : "base.syndetic_0.01",
                               "return times to the eps-neighbourhood of id have bounded gaps",
                               static_cast<double>(gap),
                               static_cast<double>(recorded_return_gap(base.name(), eps))));
        }
    }

    // monotonicity on fibre grids: blown-up fibres first, then random ones
    {
        std::vector<Point> fibres;
        for (long n = -reach; n <= reach; ++n) fibres.push_back(sys.blown_fibre(n));
        while (static_cast<long>(fibres.size()) < opt.fibres) fibres.push_back(base.random_point(rng));
        long fhat_inv = 0, h_inv = 0, bad_plateau = 0;
        for (const Point& t : fibres) {
            Orbit o = sys.orbit(t);
            Orbit next = sys.orbit(base.forward(t));
            double g = o.gamma[o.idx(0)];
            double prev_f = -INFINITY, prev_h = -INFINITY;
            for (long i = 0; i < opt.grid; ++i) {
                double x = static_cast<double>(i) / static_cast<double>(opt.grid - 1);
                double fx = sys.fhat(o, next, x).x;
                double hx = sys.h(o, x, N);
                if (!(fx > prev_f)) ++fhat_inv;
                if (hx < prev_h) ++h_inv;
                if (hx == prev_h && !(o.blown && std::fabs(hx - g) <= 1e-12)) ++bad_plateau;
                prev_f = fx;
                prev_h = hx;
            }
        }
        std::string where = std::to_string(fibres.size()) + " fibres x " + std::to_string(opt.grid) + " points";
        report.add(at_most("fhat.monotone", "fibre maps of f-hat strictly increasing", static_cast<double>(fhat_inv), 0.0, where));
        report.add(at_most("h.monotone", "h_theta non-decreasing", static_cast<double>(h_inv), 0.0, where));
        report.add(at_most("h.injective_off_curve", "h_theta plateaus only at gamma(theta*_n)", static_cast<double>(bad_plateau), 0.0, where));
    }

    // segments
    if (N >= 0) {
        double width = 0.0;
        for (long n = -reach; n <= reach; ++n) {
            MassInterval s = sys.segment(n);
            width = std::max(width, std::fabs((s.hi - s.lo) - sys.weights()(n)));
        }
        report.add(at_most("segment.width", "width of S_n equals a_n for |n| <= " + std::to_string(reach),
                           width, tail2 + 1e-15));
        double inv = 0.0;
        for (long n = -N; n < N; ++n) {
            MassInterval s = sys.segment(n), t = sys.segment(n + 1);
            auto lo = sys.fhat(sys.blown_fibre(n), s.lo);
            auto hi = sys.fhat(sys.blown_fibre(n), s.hi);
            inv = std::max({inv, std::fabs(lo.x - t.lo), std::fabs(hi.x - t.hi)});
            if (!base.same(lo.theta, sys.blown_fibre(n + 1))) inv = std::max(inv, 1.0);
        }
        report.add(at_most("segment.invariance", "f-hat sends the endpoints of S_n to those of S_n+1", inv, 1e-8));
    } else {
        report.skip("segment.width", "nothing blown up (N = -1)");
        report.skip("segment.invariance", "nothing blown up (N = -1)");
    }

    // discontinuity of any curve inside h^-1(Gamma)
    if (N >= 0) {
        const Point ts = sys.pinch().theta_star;
        std::vector<double> up, down;
        for (const Point& p : approach.upper_side) up.push_back(sys.gamma_plus(p));
        for (const Point& p : approach.lower_side) down.push_back(sys.gamma_plus(p));
        double centre = sys.gamma_plus(ts);
        double osc = INFINITY;
        std::size_t m = std::min(up.size(), down.size());
        for (std::size_t j = 0; j < m; ++j) {
            double hi = centre, lo = centre;
            for (std::size_t k = j; k < m; ++k) {
                hi = std::max({hi, up[k], down[k]});
                lo = std::min({lo, up[k], down[k]});
            }
            osc = std::min(osc, hi - lo);
        }
        report.add(at_least("curve.discontinuity",
                            "oscillation of gamma-plus on every window around theta* >= a_0",
                            osc, sys.weights()(0) - tail2 - 1e-6));
    } else {
        report.skip("curve.discontinuity", "nothing blown up (N = -1)");
    }

    // semiconjugacy and inverse on random points plus points inside segments
    {
        double semi = 0.0, inv = 0.0;
        auto probe = [&](const Point& t, double x) {
            Orbit o = sys.orbit(t);
            Orbit next = sys.orbit(base.forward(t));
            auto p = sys.fhat(o, next, x);
            double lhs = sys.h(next, p.x, N);
            double rhs = forced.forward(t, sys.h(o, x, N));
            semi = std::max(semi, std::fabs(lhs - rhs));
            auto q = sys.fhat_inv(next, o, p.x);
            inv = std::max(inv, std::fabs(q.x - x));
            if (!base.same(q.theta, t)) inv = std::max(inv, 1.0);
        };
        for (long i = 0; i < opt.random_points; ++i) {
            Point t = base.random_point(rng);
            probe(t, unit(rng));
        }
        for (long n = -reach; n <= reach; ++n) {
            MassInterval s = sys.segment(n);
            for (int k = 0; k <= 10; ++k) probe(sys.blown_fibre(n), s.lo + (s.hi - s.lo) * k / 10.0);
        }
        report.add(at_most("semiconjugacy", "h o f-hat = f o h", semi, 1e-8 + tail2,
                           std::to_string(opt.random_points) + " random points plus segment points"));
        report.add(at_most("fhat.inverse", "f-hat^-1 o f-hat = id", inv, 1e-8));
    }

    // pinching on generic fibres
    if (base.minimal && base.almost_periodic) {
        double width = 0.0;
        for (long i = 0; i < opt.generic_fibres; ++i) {
            Orbit o = sys.orbit(detail::generic_point(sys, rng, 1e-3));
            width = std::max(width, sys.mu_cdf(o, 1e-12, N, false) - sys.mu_cdf(o, -1e-12, N, false));
        }
        report.add(at_most("pinching.generic_width", "fibres of h^-1(Gamma) away from the blown-up orbit are points",
                           width, 1e-8, "upper bound mu[gamma - 1e-12, gamma + 1e-12]"));
    } else {
        report.skip("pinching.generic_width", "base not flagged minimal and almost periodic");
    }

    // minimal-set orbit stays in h^-1(Gamma)
    {
        double res = 0.0;
        for (const auto& s : sys.minimal_set_sample(opt.curve_sample)) res = std::max(res, sys.curve_residual(s));
        report.add(at_most("minimal_set.on_curve", "orbit of the bottom of S_0 stays in h^-1(Gamma)", res, 1e-8));
    }
}

}  // namespace blowup

namespace blowup {

/// Distance-pinched blow-ups over the shipped bases with their default sequences.
inline BlownUpSystem<CircleRotation> make_circle_general(long N = 40, WeightSequence w = WeightSequence(),
                                                         double theta_star = 0.3) {
    auto sys = default_qpf_system();
    auto seq = default_sequences(sys.base, theta_star);
    return blowup_general(sys.base, sys, make_pinch_general(sys.base, sys.gamma, seq), w, N);
}

inline const TorusTranslation::Point default_torus_star{0.3, 0.7};
inline const Odometer::Point default_odometer_star = 0x2545F4914F6CDD1DULL;

inline BlownUpSystem<TorusTranslation> make_torus_general(long N = 40, WeightSequence w = WeightSequence(),
                                                          TorusTranslation::Point star = default_torus_star) {
    auto sys = default_torus_system();
    auto seq = default_sequences(sys.base, star);
    return blowup_general(sys.base, sys, make_pinch_general(sys.base, sys.gamma, seq), w, N);
}

inline BlownUpSystem<Odometer> make_odometer_general(long N = 40, WeightSequence w = WeightSequence(),
                                                     Odometer::Point star = default_odometer_star) {
    auto sys = default_odometer_system();
    auto seq = default_sequences(sys.base, star);
    return blowup_general(sys.base, sys, make_pinch_general(sys.base, sys.gamma, seq), w, N);
}

}  // namespace blowup
