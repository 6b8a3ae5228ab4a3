#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/gallery.hpp"

namespace blowup {

ReesSystem::ReesSystem(double omega, double rho, double theta_star, double x_star,
                       WeightSequence weights, long N, double pinch_scale, double pinch_delta)
    : omega_(omega),
      rho_(rho),
      theta_star_(wrap01(theta_star)),
      x_star_(wrap01(x_star)),
      weights_(weights),
      N_(N),
      radius_(std::max<long>(N, 1)),
      leb_(N >= 0 ? weights.lebesgue_coefficient(N) : 1.0),
      steps_(bisection_steps(1e-15)) {
    if (N_ < -1) throw DomainError("truncation order must be >= -1");
    if (!(2.0 * pinch_scale < 1.0)) throw ScaleError("pinch bands would wrap the whole fibre circle");
    const double xs = x_star_;
    pinch_ = one_sided_pinch([xs](const double&) { return xs; }, theta_star_, pinch_scale, pinch_delta);
    for (long n = -N_ - 1; n <= N_ + 1; ++n) {
        FibreOrbit o = orbit(blown_fibre(n));
        double p = atom_position(n);
        segments_.push_back({mu_cdf(o, p, true), mu_cdf(o, p, false)});
    }
}

ReesSystem::FibreOrbit ReesSystem::orbit(double theta) const {
    FibreOrbit o;
    o.radius = radius_;
    for (long k = -radius_; k <= radius_; ++k) {
        double t = wrap01(theta + static_cast<double>(k) * omega_);
        bool is_star = circle_distance(t, theta_star_) < 1e-13;
        o.theta.push_back(t);
        o.below.push_back(is_star ? 0.0 : x_star_ - pinch_.psi(t));
        o.above.push_back(is_star ? 0.0 : pinch_.phi(t) - x_star_);
        o.star.push_back(is_star ? 1 : 0);
        if (is_star && std::labs(k) <= N_) o.blown = -k;
    }
    return o;
}

double ReesSystem::term(const FibreOrbit& o, long n, double y, bool left,
                        std::optional<bool> star_above) const {
    std::size_t i = o.idx(-n);
    double c = atom_position(n);
    if (o.star[i]) {
        if (star_above) return *star_above ? 1.0 : 0.0;
        return (left ? c < y : c <= y) ? 1.0 : 0.0;
    }
    double len = o.below[i] + o.above[i];
    if (!(len > 0.0)) throw PreconditionError("pinch functions coincide away from theta*");
    double s = wrap01(c - o.below[i]);
    double mass;
    if (s + len <= 1.0) {
        mass = std::clamp(y - s, 0.0, len);
    } else {
        mass = std::clamp(y - s, 0.0, 1.0 - s) + std::clamp(y, 0.0, s + len - 1.0);
    }
    return mass / len;
}

double ReesSystem::mu_cdf(const FibreOrbit& o, double y, bool left, std::optional<bool> star_above) const {
    y = std::clamp(y, 0.0, 1.0);
    if (N_ < 0) return y;
    double s = 0.0;
    for (long n = 0; n <= N_; ++n) {
        s += weights_(n) * term(o, n, y, left, star_above);
        if (n > 0) s += weights_(-n) * term(o, -n, y, left, star_above);
    }
    return s + leb_ * y;
}

double ReesSystem::h(const FibreOrbit& o, double x) const {
    return bisect_first([&](double y) { return mu_cdf(o, y) >= x; }, steps_);
}

MassInterval ReesSystem::segment(long n) const {
    if (std::labs(n) > N_ + 1) throw DomainError("segment index outside |n| <= N + 1");
    return segments_[static_cast<std::size_t>(n + N_ + 1)];
}

std::pair<double, double> ReesSystem::f(double theta, double y) const {
    return {wrap01(theta + omega_), wrap01(y + rho_)};
}

namespace {

MassInterval degenerate_or(const MassInterval& s) { return s; }

double affine(const MassInterval& from, const MassInterval& to, double x) {
    double len = from.hi - from.lo;
    double s = len > 0.0 ? (x - from.lo) / len : 0.0;
    return to.lo + s * (to.hi - to.lo);
}

// Whether the image atom is at or below y' = y + shift (mod 1), given the
// signed offset delta = y - p of y from the source atom p and the image atom
// position q = p + shift (mod 1), both in cut coordinates.
bool image_atom_counted(double q, double delta) {
    return delta > 0.0 ? q + delta < 1.0 : q + delta < 0.0;
}

}  // namespace

std::pair<double, double> ReesSystem::fhat(double theta, double x) const {
    FibreOrbit o = orbit(theta);
    double next = wrap01(theta + omega_);
    FibreOrbit o2 = orbit(next);
    std::optional<bool> star;
    double y = h(o, x);
    if (o.blown) {
        long n = *o.blown;
        MassInterval s = segment(n);
        if (x >= s.lo && x <= s.hi) return {next, affine(s, degenerate_or(segment(n + 1)), x)};
        double delta = y - atom_position(n);
        if (x > s.hi && !(delta > 0.0)) delta = 1e-300;
        if (x < s.lo && !(delta < 0.0)) delta = -1e-300;
        star = image_atom_counted(atom_position(n + 1), delta);
    }
    return {next, mu_cdf(o2, wrap01(y + rho_), false, star)};
}

std::pair<double, double> ReesSystem::fhat_inv(double theta, double x) const {
    FibreOrbit o = orbit(theta);
    double prev = wrap01(theta - omega_);
    FibreOrbit o2 = orbit(prev);
    std::optional<bool> star;
    double y = h(o, x);
    if (o.blown) {
        long n = *o.blown;
        MassInterval s = segment(n);
        if (x >= s.lo && x <= s.hi) return {prev, affine(s, segment(n - 1), x)};
        double delta = y - atom_position(n);
        if (x > s.hi && !(delta > 0.0)) delta = 1e-300;
        if (x < s.lo && !(delta < 0.0)) delta = -1e-300;
        star = image_atom_counted(atom_position(n - 1), delta);
    }
    return {prev, mu_cdf(o2, wrap01(y - rho_), false, star)};
}

double ReesSystem::glue_residual(long count) const {
    const double eps = 1e-12;
    double worst = 0.0;
    for (long i = 0; i < count; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        FibreOrbit o = orbit(t);
        worst = std::max(worst, circle_distance(h(o, 1.0 - eps), h(o, 0.0)));
        worst = std::max(worst, circle_distance(fhat(t, 1.0 - eps).second, fhat(t, 0.0).second));
    }
    return worst;
}

ReesSystem build_rees(double omega, double rho, double theta_star, double x_star,
                      WeightSequence weights, long N) {
    const long bound = 1000;
    for (long k1 = -bound; k1 <= bound; ++k1) {
        for (long k2 = 0; k2 <= bound; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            double v = static_cast<double>(k1) * omega + static_cast<double>(k2) * rho;
            if (circle_distance(v, 0.0) <= 1e-10) {
                std::ostringstream os;
                os << "omega, rho, 1 look rationally dependent: " << k1 << " omega + " << k2
                   << " rho is an integer";
                throw DomainError(os.str());
            }
        }
    }
    for (long n = -N; n <= N; ++n) {
        double p = wrap01(x_star + static_cast<double>(n) * rho);
        if (circle_distance(p, 0.0) < 1e-9) {
            std::ostringstream os;
            os << "atom x*_" << n << " = " << p << " lies on the cut x = 0";
            throw BasepointError(os.str(), wrap01(x_star + 1e-6));
        }
    }
    return ReesSystem(omega, rho, theta_star, x_star, weights, N);
}

double torus_distance(std::pair<double, double> p, std::pair<double, double> q) {
    return std::max(circle_distance(p.first, q.first), circle_distance(p.second, q.second));
}

DistalityRecord distality_probe(const ReesSystem& s, std::pair<double, double> p,
                                std::pair<double, double> q, long K) {
    DistalityRecord r;
    auto a = p, b = q;
    for (long n = 0; n <= K; ++n) {
        r.forward_distance.push_back(torus_distance(a, b));
        if (n < K) {
            a = s.fhat(a.first, a.second);
            b = s.fhat(b.first, b.second);
        }
    }
    a = p;
    b = q;
    for (long n = 0; n <= K; ++n) {
        r.backward_distance.push_back(torus_distance(a, b));
        if (n < K) {
            a = s.fhat_inv(a.first, a.second);
            b = s.fhat_inv(b.first, b.second);
        }
    }
    auto fwd = std::min_element(r.forward_distance.begin(), r.forward_distance.end());
    auto bwd = std::min_element(r.backward_distance.begin(), r.backward_distance.end());
    r.min_forward = *fwd;
    r.argmin_forward = fwd - r.forward_distance.begin();
    if (*bwd < *fwd) {
        r.min_two_sided = *bwd;
        r.argmin_two_sided = -(bwd - r.backward_distance.begin());
    } else {
        r.min_two_sided = *fwd;
        r.argmin_two_sided = r.argmin_forward;
    }
    return r;
}

}  // namespace blowup
