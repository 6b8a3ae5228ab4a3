#include "blowup/qpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "blowup/circle.hpp"
#include "blowup/errors.hpp"
#include "blowup/forced.hpp"

namespace blowup {

QpfSystem make_qpf(PinchMode mode, long N, WeightSequence weights, double omega,
                   double theta_star) {
    ForcedIntervalSystem<CircleRotation> sys = default_qpf_system(omega);
    for (long n = -N; n <= N; ++n) {
        double t = sys.base.iterate(theta_star, n);
        if (circle_distance(t, 0.0) < 1e-9) {
            std::ostringstream os;
            os << "theta*_" << n << " = " << t << " hits the cut point 0";
            throw BasepointError(os.str(), wrap01(theta_star + 1e-6));
        }
    }
    PinchFunctions<double> pinch;
    switch (mode) {
        case PinchMode::one_sided: pinch = one_sided_pinch(sys.gamma, theta_star); break;
        case PinchMode::oscillating: pinch = oscillating_pinch(sys.gamma, theta_star); break;
        case PinchMode::general:
            pinch = make_pinch_general(sys.base, sys.gamma, default_sequences(sys.base, theta_star));
            break;
    }
    return QpfSystem(sys, pinch, weights, N);
}

// ---- pinched set parametrization -------------------------------------------

PinchedSetParametrization::PinchedSetParametrization(const QpfSystem& sys)
    : sys_(sys), lebesgue_(sys.truncation() >= 0
                               ? sys.weights().lebesgue_coefficient(sys.truncation())
                               : 1.0) {
    std::vector<std::pair<double, double>> atoms;
    for (long n = -sys.truncation(); n <= sys.truncation(); ++n)
        atoms.emplace_back(sys.blown_fibre(n), sys.weights()(n));
    std::sort(atoms.begin(), atoms.end());
    prefix_.push_back(0.0);
    for (const auto& [p, a] : atoms) {
        position_.push_back(p);
        prefix_.push_back(prefix_.back() + a);
    }
}

double PinchedSetParametrization::snap(double theta) const {
    auto it = std::lower_bound(position_.begin(), position_.end(), theta);
    if (it != position_.end() && sys_.base().same(*it, theta)) return *it;
    if (it != position_.begin() && sys_.base().same(*(it - 1), theta)) return *(it - 1);
    return theta;
}

double PinchedSetParametrization::eta(double theta) const {
    double t = snap(theta);
    auto k = std::lower_bound(position_.begin(), position_.end(), t) - position_.begin();
    return lebesgue_ * t + prefix_[static_cast<std::size_t>(k)];
}

double PinchedSetParametrization::eta_hat(double t) const {
    // first atom whose left value eta(p_i) exceeds t
    std::size_t lo = 0, hi = position_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (lebesgue_ * position_[mid] + prefix_[mid] > t)
            hi = mid;
        else
            lo = mid + 1;
    }
    // t lies after atom lo-1 (if any) and before atom lo
    if (lo > 0) {
        std::size_t i = lo - 1;
        if (t <= lebesgue_ * position_[i] + prefix_[i + 1]) return position_[i];
    }
    double theta = (t - prefix_[lo]) / lebesgue_;
    double lower = lo > 0 ? position_[lo - 1] : 0.0;
    double upper = lo < position_.size() ? position_[lo] : 1.0;
    return std::clamp(theta, lower, upper);
}

std::pair<double, double> PinchedSetParametrization::xi(double t) const {
    double theta = eta_hat(t);
    return {theta, sys_.gamma_plus(theta) - (t - eta(theta))};
}

double PinchedSetParametrization::xi_inv(double theta, double x) const {
    double t = snap(theta);
    return eta(t) + sys_.gamma_plus(t) - x;
}

double PinchedSetParametrization::conjugated_lift(double t) const {
    auto [theta, x] = xi(t);
    auto next = sys_.fhat(theta, x);
    double turn = theta + sys_.base().omega >= 1.0 ? 1.0 : 0.0;
    return turn + xi_inv(next.theta, next.x);
}

// ---- discontinuity --------------------------------------------------------

JumpEstimate discontinuity_jump(const QpfSystem& sys, int approach_count, int first_j) {
    if (sys.pinch().mode != PinchMode::one_sided)
        throw PreconditionError("discontinuity jump needs one-sided pinch functions");
    JumpEstimate out;
    const double ts = sys.pinch().theta_star;
    for (int j = first_j; j <= first_j + approach_count; ++j) {
        double eps = std::ldexp(1.0, -j);
        auto left = sys.orbit(wrap01(ts - eps));
        auto right = sys.orbit(wrap01(ts + eps));
        double l = sys.mu_cdf(left, 0.0, sys.truncation(), true);
        double r = sys.mu_cdf(right, 0.0, sys.truncation(), false);
        out.raw.push_back(l - r);
    }
    for (std::size_t i = 0; i + 1 < out.raw.size(); ++i)
        out.extrapolated.push_back(2.0 * out.raw[i + 1] - out.raw[i]);
    const auto& e = out.extrapolated;
    if (e.empty()) {
        out.jump = out.raw.empty() ? 0.0 : out.raw.back();
        return out;
    }
    out.jump = e.back();
    out.converged = e.size() >= 2 && std::fabs(e[e.size() - 1] - e[e.size() - 2]) < 1e-9;
    return out;
}

// ---- filled-in envelope ---------------------------------------------------

const char* to_string(FillVerdict v) {
    switch (v) {
        case FillVerdict::non_filled_in: return "non-filled-in evidence";
        case FillVerdict::filled_in: return "filled-in evidence";
        case FillVerdict::inconclusive: return "inconclusive";
        case FillVerdict::no_segment: return "no blown-up segment";
    }
    return "unknown";
}

FillEnvelope filled_in_envelope(const QpfSystem& sys, const std::vector<QpfSystem::Sample>& sample,
                                long bins, double window, double cover_tol) {
    FillEnvelope env;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    env.theta.resize(static_cast<std::size_t>(bins));
    env.lower.assign(static_cast<std::size_t>(bins), nan);
    env.upper.assign(static_cast<std::size_t>(bins), nan);
    for (long i = 0; i < bins; ++i)
        env.theta[static_cast<std::size_t>(i)] = (static_cast<double>(i) + 0.5) / static_cast<double>(bins);
    for (const auto& s : sample) {
        auto i = std::min<std::size_t>(static_cast<std::size_t>(s.theta * static_cast<double>(bins)),
                                       static_cast<std::size_t>(bins - 1));
        if (std::isnan(env.lower[i]) || s.x < env.lower[i]) env.lower[i] = s.x;
        if (std::isnan(env.upper[i]) || s.x > env.upper[i]) env.upper[i] = s.x;
    }
    if (sys.truncation() < 0) {
        env.verdict = FillVerdict::no_segment;
        return env;
    }

    const double ts = sys.pinch().theta_star;
    const MassInterval s0 = sys.segment(0);
    const double mid = 0.5 * (s0.lo + s0.hi);
    const double a0 = s0.hi - s0.lo;

    std::vector<QpfSystem::Sample> near;
    double margin = INFINITY;
    long in_window = 0;
    for (const auto& s : sample) {
        double d = circle_distance(s.theta, ts);
        if (d <= cover_tol) near.push_back(s);
        if (d <= window) {
            margin = std::min(margin, std::fabs(s.x - mid));
            ++in_window;
        }
    }
    env.near_count = static_cast<long>(near.size());
    env.midpoint_margin = margin;

    const int points = 101;
    double gap = 0.0;
    for (int k = 0; k < points; ++k) {
        double x = s0.lo + a0 * static_cast<double>(k) / (points - 1);
        double best = INFINITY;
        for (const auto& s : near)
            best = std::min(best, std::max(circle_distance(s.theta, ts), std::fabs(s.x - x)));
        gap = std::max(gap, best);
    }
    env.cover_gap = gap;

    if (env.near_count < 10 || in_window == 0)
        env.verdict = FillVerdict::inconclusive;
    else if (margin >= a0 / 4.0)
        env.verdict = FillVerdict::non_filled_in;
    else if (gap <= cover_tol)
        env.verdict = FillVerdict::filled_in;
    else
        env.verdict = FillVerdict::inconclusive;
    return env;
}

}  // namespace blowup
