#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "blowup/base.hpp"
#include "blowup/errors.hpp"
#include "blowup/forced.hpp"
#include "blowup/measure.hpp"
#include "blowup/pinch.hpp"
#include "blowup/weights.hpp"

namespace blowup {

/// Extension f-hat of a forced increasing interval map obtained by blowing up
/// the points gamma(theta*_n), |n| <= N, of the invariant curve into vertical
/// segments.
///
/// Fibre measures:
///   mu_theta = sum_{|n|<=N} a_n mu^n_theta + (b + tail(N)) Leb,
///   mu^n_theta = mu^0_{alpha^-n theta} o f^{-n}_theta,
/// where mu^0 is the Dirac mass at gamma(theta*) over theta* and the uniform
/// law on [psi, phi] elsewhere. The factor map is the fibrewise quantile
/// h_theta(x) = min{ y : mu_theta[0,y] >= x } and off the blown-up fibres
/// f-hat(theta, x) = (alpha theta, mu_{alpha theta}[0, f_theta(h_theta(x))]).
///
/// Everything is immutable after construction; evaluations allocate their own
/// scratch (FibreOrbit), so concurrent readers are safe.
template <BaseSystem Base>
class BlownUpSystem {
public:
    using Point = typename Base::Point;
    using Curve = std::function<double(const Point&)>;

    struct Options {
        double quantile_tol = 1e-15;
        long aperiodicity_horizon = 1000000;
    };

    /// Fibre data along the base orbit theta_k = alpha^k(theta), |k| <= radius.
    struct FibreOrbit {
        long radius = 0;
        std::vector<Point> theta;
        std::vector<double> gamma;
        std::vector<double> below;  // gamma - psi
        std::vector<double> above;  // phi - gamma
        std::vector<char> star;     // theta_k is theta*
        std::optional<long> blown;  // n with theta = theta*_n, |n| <= N

        std::size_t idx(long k) const { return static_cast<std::size_t>(k + radius); }
        const Point& base_point() const { return theta[idx(0)]; }
    };

    struct Sample {
        Point theta;
        double x;
    };

    BlownUpSystem(ForcedIntervalSystem<Base> system, PinchFunctions<Point> pinch,
                  WeightSequence weights, long N, Options options = {})
        : sys_(std::move(system)),
          pinch_(std::move(pinch)),
          weights_(weights),
          N_(N),
          options_(options),
          steps_(bisection_steps(options.quantile_tol)) {
        if (N_ < -1) throw DomainError("truncation order must be >= -1");
        if (long p = first_period(sys_.base, options_.aperiodicity_horizon))
            throw AperiodicityError("theta* is periodic under the base map (period " +
                                    std::to_string(p) + ")");
        sys_.validate();
        radius_ = std::max<long>(N_, 1);
        for (long n = -radius_; n <= radius_; ++n) a_.push_back(std::labs(n) <= N_ ? weights_(n) : 0.0);
        for (long k = 0; k <= std::max<long>(N_, 0); ++k)
            leb_.push_back(k <= N_ ? weights_.lebesgue_coefficient(k) : 1.0);
        if (N_ < 0) leb_.assign(1, 1.0);
        for (long n = -N_ - 1; n <= N_ + 1; ++n) {
            FibreOrbit o = orbit(blown_fibre(n));
            segments_.push_back({mu_cdf(o, 0.0, N_, true), mu_cdf(o, 0.0, N_, false)});
        }
    }

    const ForcedIntervalSystem<Base>& system() const { return sys_; }
    const Base& base() const { return sys_.base; }
    const PinchFunctions<Point>& pinch() const { return pinch_; }
    const WeightSequence& weights() const { return weights_; }
    long truncation() const { return N_; }
    double tail() const { return weights_.tail(N_); }
    double gamma(const Point& t) const { return sys_.gamma(t); }

    /// theta*_n = alpha^n(theta*)
    Point blown_fibre(long n) const { return sys_.base.iterate(pinch_.theta_star, n); }

    FibreOrbit orbit(const Point& theta) const {
        FibreOrbit o;
        o.radius = radius_;
        const std::size_t len = static_cast<std::size_t>(2 * radius_ + 1);
        o.theta.reserve(len);
        o.gamma.reserve(len);
        o.below.reserve(len);
        o.above.reserve(len);
        o.star.reserve(len);
        for (long k = -radius_; k <= radius_; ++k) {
            Point t = k == 0 ? theta : sys_.base.iterate(theta, k);
            double g = sys_.gamma(t);
            bool is_star = sys_.base.same(t, pinch_.theta_star);
            o.theta.push_back(t);
            o.gamma.push_back(g);
            o.below.push_back(is_star ? 0.0 : g - pinch_.psi(t));
            o.above.push_back(is_star ? 0.0 : pinch_.phi(t) - g);
            o.star.push_back(is_star ? 1 : 0);
            if (is_star && std::labs(k) <= N_) o.blown = -k;
        }
        return o;
    }

    // ---- fibre measures -------------------------------------------------

    double mu0_cdf(const Point& theta, double y) const {
        FibreOrbit o = orbit(theta);
        return mu0(o, 0, y - o.gamma[o.idx(0)], false);
    }

    /// mu^n_theta[0, y] for |n| <= max(N, 1).
    double mun_cdf(long n, const Point& theta, double y) const {
        if (std::labs(n) > radius_) throw DomainError("mun_cdf: |n| exceeds the orbit window");
        FibreOrbit o = orbit(theta);
        double d = y - o.gamma[o.idx(0)];
        if (n > 0) {
            for (long j = 1; j <= n; ++j) d = pull_back(o, j, d);
        } else {
            for (long j = 1; j <= -n; ++j) d = push_forward(o, j, d);
        }
        return mu0(o, -n, d, false);
    }

    double mu_cdf(const Point& theta, double y) const {
        FibreOrbit o = orbit(theta);
        return mu_cdf(o, y - o.gamma[o.idx(0)], N_, false);
    }
    double mu_cdf_left(const Point& theta, double y) const {
        FibreOrbit o = orbit(theta);
        return mu_cdf(o, y - o.gamma[o.idx(0)], N_, true);
    }

    /// CDF of the truncation mu^(k) at the point with deviation `dev` from
    /// gamma(theta). `left` selects mu[0, y) instead of mu[0, y].
    double mu_cdf(const FibreOrbit& o, double dev, long k, bool left) const {
        k = std::min(k, N_);
        const double y = std::clamp(o.gamma[o.idx(0)] + dev, 0.0, 1.0);
        const double leb = k < 0 ? 1.0 : leb_[static_cast<std::size_t>(k)];
        if (k < 0) return y;
        double s = weight(0) * mu0(o, 0, dev, left);
        double d = dev;
        for (long n = 1; n <= k; ++n) {
            d = pull_back(o, n, d);
            s += weight(n) * mu0(o, -n, d, left);
        }
        d = dev;
        for (long m = 1; m <= k; ++m) {
            d = push_forward(o, m, d);
            s += weight(-m) * mu0(o, m, d, left);
        }
        return s + leb * y;
    }

    // ---- factor map ------------------------------------------------------

    double h(const FibreOrbit& o, double x, long k) const {
        const double g0 = o.gamma[o.idx(0)];
        return bisect_first([&](double y) { return mu_cdf(o, y - g0, k, false) >= x; }, steps_);
    }
    double h_fibre(const Point& theta, double x) const {
        check_level(x);
        return h(orbit(theta), x, N_);
    }
    double h_truncated(long k, const Point& theta, double x) const {
        check_level(x);
        if (k > N_) throw DomainError("truncation order above N");
        return h(orbit(theta), x, k);
    }

    /// [mu[0, gamma), mu[0, gamma]] over theta*_n, |n| <= N + 1. The entries
    /// with |n| = N + 1 are degenerate.
    MassInterval segment(long n) const {
        if (std::labs(n) > N_ + 1) throw DomainError("segment index outside |n| <= N + 1");
        return segments_[static_cast<std::size_t>(n + N_ + 1)];
    }

    double gamma_plus(const Point& theta) const {
        FibreOrbit o = orbit(theta);
        return mu_cdf(o, 0.0, N_, false);
    }
    double gamma_minus(const Point& theta) const {
        FibreOrbit o = orbit(theta);
        return mu_cdf(o, 0.0, N_, true);
    }

    // ---- dynamics ----------------------------------------------------------

    Sample fhat(const Point& theta, double x) const {
        FibreOrbit o = orbit(theta);
        return fhat(o, orbit(o.theta[o.idx(1)]), x);
    }

    /// f-hat with the orbit windows of theta and alpha(theta) supplied.
    Sample fhat(const FibreOrbit& o, const FibreOrbit& next, double x) const {
        if (o.blown) {
            long n = *o.blown;
            MassInterval s = segment(n);
            if (x >= s.lo && x <= s.hi) return {next.base_point(), affine(s, segment(n + 1), x)};
        }
        double y = h(o, x, N_);
        double d = sys_.fibre.forward_dev(o.gamma[o.idx(0)], o.gamma[o.idx(1)], y - o.gamma[o.idx(0)]);
        return {next.base_point(), mu_cdf(next, d, N_, false)};
    }

    Sample fhat_inv(const Point& theta, double x) const {
        FibreOrbit o = orbit(theta);
        return fhat_inv(o, orbit(o.theta[o.idx(-1)]), x);
    }

    Sample fhat_inv(const FibreOrbit& o, const FibreOrbit& prev, double x) const {
        if (o.blown) {
            long n = *o.blown;
            MassInterval s = segment(n);
            if (x >= s.lo && x <= s.hi) return {prev.base_point(), affine(s, segment(n - 1), x)};
        }
        double y = h(o, x, N_);
        double d = sys_.fibre.inverse_dev(o.gamma[o.idx(-1)], o.gamma[o.idx(0)], y - o.gamma[o.idx(0)]);
        return {prev.base_point(), mu_cdf(prev, d, N_, false)};
    }

    /// f(theta, y) in base coordinates.
    double f(const Point& theta, double y) const { return sys_.forward(theta, y); }

    /// K points of the forward f-hat orbit of the lower end of segment(0)
    /// (of (theta*, gamma(theta*)) when nothing is blown up).
    std::vector<Sample> minimal_set_sample(long K) const {
        std::vector<Sample> out;
        if (K <= 0) return out;
        out.reserve(static_cast<std::size_t>(K));
        Sample p{pinch_.theta_star, N_ >= 0 ? segment(0).lo : sys_.gamma(pinch_.theta_star)};
        for (long k = 0; k < K; ++k) {
            out.push_back(p);
            if (k + 1 < K) p = fhat(p.theta, p.x);
        }
        return out;
    }

    /// |h_theta(x) - gamma(theta)|
    double curve_residual(const Sample& s) const {
        return std::fabs(h_fibre(s.theta, s.x) - sys_.gamma(s.theta));
    }

    // ---- global attractor --------------------------------------------------

    struct Envelopes {
        std::vector<Point> thetas;
        std::vector<std::vector<double>> lower;  // [depth][i]
        std::vector<std::vector<double>> upper;
    };

    /// Images of the boundary curves of h^{-1}(Theta x [lo, hi]) under f-hat^j,
    /// j = 0..depth, over the given fibres. Throws PreconditionError unless f
    /// maps Theta x [lo, hi] into its interior.
    Envelopes global_attractor(const std::vector<Point>& thetas, long depth, double lo = 0.05,
                               double hi = 0.95) const {
        for (const Point& t : sys_.base.grid(1000)) {
            if (!(f(t, lo) > lo && f(t, hi) < hi))
                throw PreconditionError("fibre maps do not send the annulus into its interior");
        }
        Envelopes env{thetas, {}, {}};
        for (long j = 0; j <= depth; ++j) {
            std::vector<double> low, up;
            for (const Point& t : thetas) {
                Point start = sys_.base.iterate(t, -j);
                FibreOrbit o = orbit(start);
                const double g0 = o.gamma[o.idx(0)];
                Sample a{start, mu_cdf(o, lo - g0, N_, true)};
                Sample b{start, mu_cdf(o, hi - g0, N_, false)};
                for (long i = 0; i < j; ++i) {
                    a = fhat(a.theta, a.x);
                    b = fhat(b.theta, b.x);
                }
                low.push_back(a.x);
                up.push_back(b.x);
            }
            env.lower.push_back(std::move(low));
            env.upper.push_back(std::move(up));
        }
        return env;
    }

private:
    double weight(long n) const { return a_[static_cast<std::size_t>(n + radius_)]; }

    static void check_level(double x) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("fibre coordinate outside [0,1]");
    }

    static double affine(const MassInterval& from, const MassInterval& to, double x) {
        double len = from.hi - from.lo;
        double s = len > 0.0 ? (x - from.lo) / len : 0.0;
        return to.lo + s * (to.hi - to.lo);
    }

    // deviation at theta_{-j} of the f^{-1} preimage of deviation d at theta_{-j+1}
    double pull_back(const FibreOrbit& o, long j, double d) const {
        return sys_.fibre.inverse_dev(o.gamma[o.idx(-j)], o.gamma[o.idx(-j + 1)], d);
    }
    // deviation at theta_j of the f image of deviation d at theta_{j-1}
    double push_forward(const FibreOrbit& o, long j, double d) const {
        return sys_.fibre.forward_dev(o.gamma[o.idx(j - 1)], o.gamma[o.idx(j)], d);
    }

    // mu^0 over theta_k, evaluated at deviation d from gamma(theta_k)
    double mu0(const FibreOrbit& o, long k, double d, bool left) const {
        std::size_t i = o.idx(k);
        if (o.star[i]) return (left ? d > 0.0 : d >= 0.0) ? 1.0 : 0.0;
        double width = o.below[i] + o.above[i];
        if (!(width > 0.0))
            throw PreconditionError("pinch functions coincide away from theta*");
        return std::clamp((d + o.below[i]) / width, 0.0, 1.0);
    }

    ForcedIntervalSystem<Base> sys_;
    PinchFunctions<Point> pinch_;
    WeightSequence weights_;
    long N_;
    Options options_;
    int steps_;
    long radius_ = 1;
    std::vector<double> a_;    // a_n for |n| <= radius, zero beyond N
    std::vector<double> leb_;  // Lebesgue coefficient of mu^(k)
    std::vector<MassInterval> segments_;
};

}  // namespace blowup
