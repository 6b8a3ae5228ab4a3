#include "blowup/denjoy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/circle.hpp"
#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr double kCutClearance = 1e-9;

bool in_arc(double p, double a, double b) { return wrap01(p - a) <= wrap01(b - a); }

}  // namespace

bool looks_irrational(double omega, long horizon, double tol) {
    for (long q = 1; q <= horizon; ++q) {
        if (circle_distance(static_cast<double>(q) * omega, 0.0) <= tol) return false;
    }
    return true;
}

HybridMeasure build_nu(double omega, double x0, const WeightSequence& weights, long N) {
    if (N < -1) throw DomainError("truncation order must be >= -1");
    if (!looks_irrational(omega)) throw DomainError("rotation angle looks rational");
    std::vector<Atom> atoms;
    for (long n = -N; n <= N; ++n) {
        double xn = wrap01(x0 + static_cast<double>(n) * omega);
        if (circle_distance(xn, 0.0) < kCutClearance) {
            // nudge the basepoint by a fraction of the smallest orbit spacing
            double suggestion = wrap01(x0 + 0.5 * weights(N) + 1e-7);
            std::ostringstream os;
            os << "orbit point x_" << n << " = " << xn << " hits the cut point 0; try x0 = "
               << suggestion;
            throw BasepointError(os.str(), suggestion);
        }
        atoms.push_back({xn, weights(n)});
    }
    double lebesgue = weights.lebesgue_coefficient(N);
    return HybridMeasure(std::move(atoms), [lebesgue](double y) { return lebesgue * y; });
}

double DenjoySystem::golden_default() { return golden_mean; }

DenjoySystem::DenjoySystem(double omega, double x0, WeightSequence weights, long N)
    : omega_(omega),
      x0_(x0),
      weights_(weights),
      N_(N),
      nu_(build_nu(omega, x0, weights, N)) {
    for (long n = -N_; n <= N_; ++n) {
        double xn = orbit_point(n);
        gaps_.push_back({n, cdf_left(nu_, xn), cdf(nu_, xn), weights_(n)});
    }
    order_.resize(gaps_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(),
              [this](std::size_t a, std::size_t b) { return gaps_[a].c < gaps_[b].c; });
}

double DenjoySystem::orbit_point(long n) const {
    return wrap01(x0_ + static_cast<double>(n) * omega_);
}

std::optional<long> DenjoySystem::gap_containing(double y) const {
    auto it = std::upper_bound(order_.begin(), order_.end(), y,
                               [this](double v, std::size_t i) { return v < gaps_[i].c; });
    if (it == order_.begin()) return std::nullopt;
    const Gap& g = gaps_[*(it - 1)];
    if (y <= g.d) return g.n;
    return std::nullopt;
}

bool DenjoySystem::in_open_gap(double y, double margin) const {
    auto n = gap_containing(y);
    if (!n) return false;
    const Gap& g = gap(*n);
    return g.c + margin < y && y < g.d - margin;
}

double DenjoySystem::h(double x) const { return quantile(nu_, x); }

double DenjoySystem::lift(double y) const {
    double base = std::floor(y);
    double u = y - base;
    if (auto n = gap_containing(u)) {
        const Gap& g = gap(*n);
        double target_x = orbit_point(*n) + omega_;
        double turn = std::floor(target_x);
        double lo, hi;
        if (std::labs(*n + 1) <= N_) {
            lo = gap(*n + 1).c;
            hi = gap(*n + 1).d;
        } else {
            lo = hi = cdf(nu_, wrap01(target_x));
        }
        double s = g.length() > 0.0 ? (u - g.c) / g.length() : 0.0;
        return base + turn + lo + s * (hi - lo);
    }
    double z = h(u) + omega_;
    double turn = std::floor(z);
    return base + turn + cdf(nu_, z - turn);
}

double DenjoySystem::forward(double y) const { return wrap01(lift(wrap01(y))); }

double DenjoySystem::inverse(double y) const {
    double u = wrap01(y);
    if (auto n = gap_containing(u)) {
        const Gap& g = gap(*n);
        double lo, hi;
        if (std::labs(*n - 1) <= N_) {
            lo = gap(*n - 1).c;
            hi = gap(*n - 1).d;
        } else {
            lo = hi = cdf(nu_, orbit_point(*n - 1));
        }
        double s = g.length() > 0.0 ? (u - g.c) / g.length() : 0.0;
        return wrap01(lo + s * (hi - lo));
    }
    return cdf(nu_, wrap01(h(u) - omega_));
}

std::function<double(double)> denjoy_h(const DenjoySystem& sys) {
    return [&sys](double x) { return sys.h(x); };
}

MonotoneMapOracle denjoy_map(const DenjoySystem& sys) {
    return {[&sys](double y) { return sys.forward(y); },
            [&sys](double y) { return sys.inverse(y); }, true};
}

std::vector<double> minimal_set_sample(const DenjoySystem& sys, long K) {
    std::vector<double> out;
    if (K <= 0) return out;
    out.reserve(static_cast<std::size_t>(K));
    double y = sys.truncation() >= 0 ? sys.gap(0).c : 0.0;
    for (long k = 0; k < K; ++k) {
        out.push_back(y);
        y = sys.forward(y);
    }
    return out;
}

double wandering_margin(const DenjoySystem& sys, long k_max) {
    if (sys.truncation() < 0) return -1.0;
    const Gap& g0 = sys.gap(0);
    double u = g0.c, v = g0.d;
    double margin = 1.0;
    for (long k = 1; k <= k_max; ++k) {
        u = sys.forward(u);
        v = sys.forward(v);
        // past |n| = N the image is a point; rounding may put v just before u
        if (wrap01(v - u) > 0.5) v = u;
        if (in_arc(u, g0.c, g0.d) || in_arc(v, g0.c, g0.d) || in_arc(g0.c, u, v))
            return -1.0;
        double m = std::min({circle_distance(v, g0.c), circle_distance(g0.d, u),
                             circle_distance(u, g0.c), circle_distance(v, g0.d)});
        margin = std::min(margin, m);
    }
    return margin;
}

double periodic_defect(const DenjoySystem& sys, long q_max, long grid) {
    double rho = sys.omega();
    double worst = 1.0;
    for (long i = 0; i < grid; ++i) {
        double y0 = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
        double y = y0;
        for (long q = 1; q <= q_max; ++q) {
            y = sys.lift(y);
            double p = std::round(static_cast<double>(q) * rho);
            worst = std::min(worst, std::fabs(y - y0 - p));
        }
    }
    return worst;
}

double covering_radius(const DenjoySystem& sys, const std::vector<double>& sample, long grid) {
    std::vector<double> s(sample);
    std::sort(s.begin(), s.end());
    if (s.empty()) return 1.0;
    double worst = 0.0;
    for (long i = 0; i < grid; ++i) {
        double y = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
        if (sys.in_open_gap(y)) continue;
        auto it = std::lower_bound(s.begin(), s.end(), y);
        double best = 1.0;
        if (it != s.end()) best = std::min(best, circle_distance(*it, y));
        if (it != s.begin()) best = std::min(best, circle_distance(*(it - 1), y));
        best = std::min({best, circle_distance(s.front(), y), circle_distance(s.back(), y)});
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace blowup
