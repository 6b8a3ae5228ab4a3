#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "blowup/base.hpp"
#include "blowup/errors.hpp"

namespace blowup {

enum class PinchMode { one_sided, oscillating, general };

std::string to_string(PinchMode m);
PinchMode parse_pinch_mode(const std::string& s);

/// Curves psi <= gamma <= phi that pinch together only at theta_star. The
/// blow-up measure over theta != theta_star is uniform on [psi, phi].
template <class Point>
struct PinchFunctions {
    Point theta_star{};
    std::function<double(const Point&)> phi;
    std::function<double(const Point&)> psi;
    PinchMode mode = PinchMode::one_sided;
};

namespace detail {

// 0 on [-delta, 0], rising linearly to 1 on [-2 delta, -delta] and on [0, delta].
inline double one_sided_bump(double t, double delta) {
    if (t >= 0.0) return std::fmin(1.0, t / delta);
    if (t >= -delta) return 0.0;
    return std::fmin(1.0, (-delta - t) / delta);
}

}  // namespace detail

/// phi = gamma on a left neighbourhood [theta* - delta, theta*] and psi = gamma
/// on the right neighbourhood [theta*, theta* + delta]; psi < phi elsewhere.
inline PinchFunctions<double> one_sided_pinch(std::function<double(const double&)> gamma,
                                              double theta_star, double scale = 0.3,
                                              double delta = 0.1) {
    auto phi = [gamma, theta_star, scale, delta](const double& t) {
        return gamma(t) + scale * detail::one_sided_bump(circle_offset(t, theta_star), delta);
    };
    auto psi = [gamma, theta_star, scale, delta](const double& t) {
        return gamma(t) - scale * detail::one_sided_bump(-circle_offset(t, theta_star), delta);
    };
    return {theta_star, phi, psi, PinchMode::one_sided};
}

/// Points with phi = gamma > psi and points with phi > gamma = psi both
/// accumulate on theta* from either side: the split of the width
/// min(|t|, delta) between phi and psi follows (1 +- sin(pi log2 |t|)) / 2.
inline PinchFunctions<double> oscillating_pinch(std::function<double(const double&)> gamma,
                                                double theta_star, double scale = 0.3,
                                                double delta = 0.1) {
    auto split = [theta_star, delta](double t, double sign) {
        double u = std::fabs(circle_offset(t, theta_star));
        if (u == 0.0) return 0.0;
        double width = std::fmin(u, delta) / delta;
        return width * 0.5 * (1.0 + sign * std::sin(std::numbers::pi * std::log2(u)));
    };
    auto phi = [gamma, split, scale](const double& t) { return gamma(t) + scale * split(t, 1.0); };
    auto psi = [gamma, split, scale](const double& t) { return gamma(t) - scale * split(t, -1.0); };
    return {theta_star, phi, psi, PinchMode::oscillating};
}

/// Two disjoint sequences S, T converging to theta_star, and the scale c of the
/// distance-based pinch functions.
template <class Point>
struct PinchSequences {
    Point theta_star{};
    std::vector<Point> S;
    std::vector<Point> T;
    double scale;
};

template <BaseSystem Base>
void validate_sequences(const Base& base, const PinchSequences<typename Base::Point>& seq) {
    auto check_one = [&](const std::vector<typename Base::Point>& v, const char* label) {
        double prev = INFINITY;
        for (const auto& p : v) {
            double d = base.distance(p, seq.theta_star);
            if (base.same(p, seq.theta_star))
                throw PreconditionError(std::string(label) + " contains theta*");
            if (!(d < prev))
                throw PreconditionError(std::string(label) +
                                        " does not approach theta* strictly monotonically");
            prev = d;
        }
    };
    check_one(seq.S, "S");
    check_one(seq.T, "T");
    for (const auto& s : seq.S)
        for (const auto& t : seq.T)
            if (base.same(s, t)) throw PreconditionError("S and T intersect");
    if (!(seq.scale > 0.0)) throw ScaleError("pinch scale must be positive");
}

/// d(theta, S) over the stored prefix of S together with its limit theta*.
template <BaseSystem Base>
double distance_to_sequence(const Base& base, const typename Base::Point& theta,
                            const std::vector<typename Base::Point>& seq,
                            const typename Base::Point& limit) {
    double d = base.distance(theta, limit);
    for (const auto& p : seq) d = std::min(d, base.distance(theta, p));
    return d;
}

/// phi = gamma + c dist(., S), psi = gamma - c dist(., T). Throws ScaleError
/// when phi or psi leaves (0,1) on a dense sample.
template <BaseSystem Base>
PinchFunctions<typename Base::Point> make_pinch_general(
    const Base& base, std::function<double(const typename Base::Point&)> gamma,
    const PinchSequences<typename Base::Point>& seq, std::size_t check_count = 4096) {
    using Point = typename Base::Point;
    validate_sequences(base, seq);
    auto phi = [base, gamma, seq](const Point& t) {
        return gamma(t) + seq.scale * distance_to_sequence(base, t, seq.S, seq.theta_star);
    };
    auto psi = [base, gamma, seq](const Point& t) {
        return gamma(t) - seq.scale * distance_to_sequence(base, t, seq.T, seq.theta_star);
    };
    std::vector<Point> probe = base.grid(check_count);
    probe.insert(probe.end(), seq.S.begin(), seq.S.end());
    probe.insert(probe.end(), seq.T.begin(), seq.T.end());
    for (const Point& p : probe) {
        double hi = phi(p), lo = psi(p);
        if (!(hi < 1.0 && lo > 0.0))
            throw ScaleError("pinch functions leave the open fibre interval; use a smaller scale c");
    }
    return {seq.theta_star, phi, psi, PinchMode::general};
}

inline PinchSequences<double> default_sequences(const CircleRotation&, double theta_star,
                                                double scale = 0.5, int length = 20) {
    PinchSequences<double> seq{theta_star, {}, {}, scale};
    for (int n = 1; n <= length; ++n) {
        double step = std::pow(3.0, -n);
        seq.S.push_back(wrap01(theta_star + step));
        seq.T.push_back(wrap01(theta_star - step));
    }
    return seq;
}

inline PinchSequences<TorusTranslation::Point> default_sequences(
    const TorusTranslation&, TorusTranslation::Point theta_star, double scale = 0.5,
    int length = 20) {
    PinchSequences<TorusTranslation::Point> seq{theta_star, {}, {}, scale};
    for (int n = 1; n <= length; ++n) {
        double step = std::pow(3.0, -n);
        seq.S.push_back({wrap01(theta_star[0] + step), wrap01(theta_star[1] + step)});
        seq.T.push_back({wrap01(theta_star[0] - step), wrap01(theta_star[1] - step)});
    }
    return seq;
}

/// sigma_n differs from theta* first at digit 2n, tau_n first at digit 2n+1.
inline PinchSequences<Odometer::Point> default_sequences(const Odometer&,
                                                         Odometer::Point theta_star,
                                                         double scale = 0.25, int length = 20) {
    PinchSequences<Odometer::Point> seq{theta_star, {}, {}, scale};
    for (int n = 0; n < length; ++n) {
        seq.S.push_back(theta_star ^ (1ULL << (2 * n)));
        seq.T.push_back(theta_star ^ (1ULL << (2 * n + 1)));
    }
    return seq;
}

}  // namespace blowup
