#include <algorithm>
#include <cmath>
#include <random>

#include "blowup/errors.hpp"
#include "blowup/gallery.hpp"

namespace blowup {

double PiecewiseLinearMap::operator()(double t) const {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    double s = (t - x[i]) / (x[i + 1] - x[i]);
    return y[i] + s * (y[i + 1] - y[i]);
}

double PiecewiseLinearMap::slope_at(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin(), 1)) - 1,
                             x.size() - 2);
    return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
}

PiecewiseLinearMap build_g() {
    return {{0.0, 0.5, 0.6, 0.8, 1.0}, {0.5, 1.0, 0.66, 0.74, 0.0}};
}

IntervalMapScan scan_interval_map(const PiecewiseLinearMap& g, long grid) {
    IntervalMapScan out;
    int last_sign = 0;
    double last_x = 0.0;
    for (long i = 0; i <= grid; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(grid);
        double v = g(x) - x;
        int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) {
            ++out.sign_changes;
            double lo = last_x, hi = x;
            for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                int sm = (g(mid) - mid > 0.0) ? 1 : -1;
                (sm == last_sign ? lo : hi) = mid;
            }
            out.fixed_point = 0.5 * (lo + hi);
            out.fixed_slope = g.slope_at(out.fixed_point);
        }
        last_sign = s;
        last_x = x;
    }
    for (double p : {0.0, 0.5, 1.0}) out.cycle_residual = std::max(out.cycle_residual, std::fabs(g(g(g(p))) - p));
    return out;
}

// ---- surgery ------------------------------------------------------------------

SurgerySystem::SurgerySystem(const QpfSystem& inner, PiecewiseLinearMap g, double a_minus,
                             double a_plus, double inner_lo, double inner_hi)
    : inner_(inner), g_(std::move(g)), a_minus_(a_minus), a_plus_(a_plus), lo_(inner_lo), hi_(inner_hi) {}

SurgerySystem::Bands SurgerySystem::bands(double theta) const {
    auto o = inner_.orbit(theta);
    const auto& fibre = inner_.system().fibre;
    const long N = inner_.truncation();
    double g0 = o.gamma[o.idx(0)], gp = o.gamma[o.idx(-1)];
    Bands b;
    b.L = inner_.mu_cdf(o, lo_ - g0, N, false);
    b.U = inner_.mu_cdf(o, hi_ - g0, N, false);
    b.Lhat = inner_.mu_cdf(o, fibre.forward_dev(gp, g0, lo_ - gp), N, false);
    b.Uhat = inner_.mu_cdf(o, fibre.forward_dev(gp, g0, hi_ - gp), N, false);
    return b;
}

double SurgerySystem::glue(double theta, double xhat) const {
    Bands b = bands(theta);
    double gm = g_(a_minus_), gp = g_(a_plus_);
    if (xhat <= b.Lhat) return a_minus_ + (xhat - b.L) / (b.Lhat - b.L) * (gm - a_minus_);
    if (xhat <= b.Uhat) return gm + (xhat - b.Lhat) / (b.Uhat - b.Lhat) * (gp - gm);
    return gp + (xhat - b.Uhat) / (b.U - b.Uhat) * (a_plus_ - gp);
}

double SurgerySystem::unglue(double theta, double x) const {
    Bands b = bands(theta);
    double gm = g_(a_minus_), gp = g_(a_plus_);
    if (x <= gm) return b.L + (x - a_minus_) / (gm - a_minus_) * (b.Lhat - b.L);
    if (x <= gp) return b.Lhat + (x - gm) / (gp - gm) * (b.Uhat - b.Lhat);
    return b.Uhat + (x - gp) / (a_plus_ - gp) * (b.U - b.Uhat);
}

double SurgerySystem::glue_scale(double theta) const {
    Bands b = bands(theta);
    return (g_(a_plus_) - g_(a_minus_)) / (b.Uhat - b.Lhat);
}

std::pair<double, double> SurgerySystem::outer(double theta, double x) const {
    return {wrap01(theta + omega()), g_(x)};
}

std::pair<double, double> SurgerySystem::forward(double theta, double x) const {
    if (x < a_minus_ || x > a_plus_) return outer(theta, x);
    auto p = inner_.fhat(theta, unglue(theta, x));
    return {p.theta, glue(p.theta, p.x)};
}

double SurgerySystem::boundary_residual(long count) const {
    double worst = 0.0;
    for (long i = 0; i < count; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        for (double edge : {a_minus_, a_plus_}) {
            auto p = inner_.fhat(t, unglue(t, edge));
            worst = std::max(worst, std::fabs(glue(p.theta, p.x) - outer(t, edge).second));
        }
    }
    return worst;
}

SurgerySystem build_sharkovsky(const QpfSystem& inner, double a_minus, double a_plus) {
    PiecewiseLinearMap g = build_g();
    IntervalMapScan scan = scan_interval_map(g);
    double x0 = scan.fixed_point;
    if (!(scan.sign_changes == 1 && a_minus < g(a_minus) && g(a_minus) < x0 && x0 < g(a_plus) &&
          g(a_plus) < a_plus))
        throw PreconditionError("need a- < g(a-) < x0 < g(a+) < a+ around the unique fixed point");
    // g^3(x) - x vanishes in [a-, a+] only at x0
    {
        int changes = 0, last = 0;
        for (long i = 0; i <= 10000; ++i) {
            double x = a_minus + (a_plus - a_minus) * static_cast<double>(i) / 10000.0;
            double v = g(g(g(x))) - x;
            int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
            if (s != 0 && last != 0 && s != last) ++changes;
            if (s != 0) last = s;
        }
        if (changes != 1) throw PreconditionError("[a-, a+] contains a 3-periodic point of g");
    }
    for (const double t : inner.base().grid(1000)) {
        if (!(inner.f(t, 0.05) > 0.05 && inner.f(t, 0.95) < 0.95))
            throw PreconditionError("inner system does not map its annulus into the interior");
    }
    SurgerySystem s(inner, g, a_minus, a_plus);
    double residual = s.boundary_residual(10000);
    if (residual > 1e-8) throw ConstructionError("surgery is discontinuous across the annulus boundary", residual);
    return s;
}

double three_cycle_residual(const SurgerySystem& s, long grid) {
    double worst = 0.0;
    for (long i = 0; i < grid; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
        for (double p : {0.0, 0.5, 1.0}) {
            std::pair<double, double> z{t, p};
            double expect = p;
            for (int k = 0; k < 3; ++k) {
                z = s.forward(z.first, z.second);
                expect = s.g()(expect);
                worst = std::max(worst, std::fabs(z.second - expect));
            }
            worst = std::max(worst, std::fabs(z.second - p));
        }
    }
    return worst;
}

CurveCertificate certify_no_invariant_curve(const SurgerySystem& s, int depth, int approach,
                                            long basin_samples, std::uint64_t seed) {
    CurveCertificate c;
    const QpfSystem& inner = s.inner();
    const double ts = inner.pinch().theta_star;
    const double omega = s.omega();
    auto envelope = [&](double theta) {
        std::pair<double, double> z{wrap01(theta - depth * omega), s.a_plus()};
        for (int k = 0; k < depth; ++k) z = s.forward(z.first, z.second);
        return z.second;
    };
    c.centre = envelope(ts);
    // a window 2^-j is resolved only once the pushes have contracted the fibre
    // well below the pinch width there, so the finest window follows the depth
    approach = std::min(approach, std::max(1, depth - 10));
    for (int j = 0; j < approach; ++j) {
        double eps = std::ldexp(1.0, -4 - j);
        c.upper_side.push_back(envelope(wrap01(ts - eps)));
        c.lower_side.push_back(envelope(wrap01(ts + eps)));
    }
    c.oscillation = INFINITY;
    for (int j = 0; j < approach; ++j) {
        double hi = c.centre, lo = c.centre;
        for (int k = j; k < approach; ++k) {
            hi = std::max({hi, c.upper_side[k], c.lower_side[k]});
            lo = std::min({lo, c.upper_side[k], c.lower_side[k]});
        }
        c.oscillation = std::min(c.oscillation, hi - lo);
    }
    c.scale = s.glue_scale(ts);
    c.required = 0.8 * inner.weights()(0) * c.scale;
    c.certified = c.oscillation >= c.required;

    IntervalMapScan scan = scan_interval_map(s.g());
    c.fixed_points = scan.sign_changes;
    c.fixed_point_inside = scan.fixed_point > s.a_minus() && scan.fixed_point < s.a_plus();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    long entered = 0, drawn = 0;
    while (drawn < basin_samples) {
        double x = unit(rng), t = unit(rng);
        if (x >= s.a_minus() && x <= s.a_plus()) continue;
        ++drawn;
        for (int k = 0; k < 1000; ++k) {
            if (x >= s.a_minus() && x <= s.a_plus()) {
                ++entered;
                break;
            }
            std::tie(t, x) = s.outer(t, x);
        }
    }
    c.basin_fraction = basin_samples > 0 ? static_cast<double>(entered) / static_cast<double>(basin_samples) : 0.0;
    c.cycle_residual = three_cycle_residual(s, 1000);
    return c;
}

}  // namespace blowup
