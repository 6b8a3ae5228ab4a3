#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "blowup/circle.hpp"

namespace blowup {

/// A driving system (Theta, alpha, d). The blow-up machinery only needs orbit
/// arithmetic, the metric, and an equality test used to detect blown-up fibres.
template <class B>
concept BaseSystem = requires(const B& b, const typename B::Point& p, long n, std::mt19937_64& rng,
                              std::size_t count) {
    { b.forward(p) } -> std::same_as<typename B::Point>;
    { b.backward(p) } -> std::same_as<typename B::Point>;
    { b.iterate(p, n) } -> std::same_as<typename B::Point>;
    { b.distance(p, p) } -> std::convertible_to<double>;
    { b.same(p, p) } -> std::convertible_to<bool>;
    { b.displacement(n) } -> std::convertible_to<double>;
    { b.random_point(rng) } -> std::same_as<typename B::Point>;
    { b.grid(count) } -> std::same_as<std::vector<typename B::Point>>;
    { b.minimal } -> std::convertible_to<bool>;
    { b.almost_periodic } -> std::convertible_to<bool>;
    { b.name() } -> std::convertible_to<std::string>;
};

/// theta -> theta + omega on [0,1).
struct CircleRotation {
    using Point = double;

    double omega = golden_mean;
    bool minimal = true;
    bool almost_periodic = true;

    Point iterate(Point p, long n) const { return wrap01(p + static_cast<double>(n) * omega); }
    Point forward(Point p) const { return iterate(p, 1); }
    Point backward(Point p) const { return iterate(p, -1); }
    double distance(Point a, Point b) const { return circle_distance(a, b); }
    bool same(Point a, Point b) const { return distance(a, b) < 1e-13; }
    /// sup_theta d(alpha^n theta, theta)
    double displacement(long n) const { return circle_distance(static_cast<double>(n) * omega, 0.0); }
    Point random_point(std::mt19937_64& rng) const {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    std::vector<Point> grid(std::size_t count) const {
        std::vector<Point> g(count);
        for (std::size_t i = 0; i < count; ++i)
            g[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        return g;
    }
    std::string name() const { return "rotation"; }
};

/// (theta1, theta2) -> (theta1 + omega1, theta2 + omega2) with the max metric.
struct TorusTranslation {
    using Point = std::array<double, 2>;

    double omega1 = golden_mean;
    double omega2 = 0.41421356237309503;  // sqrt(2) - 1
    bool minimal = true;
    bool almost_periodic = true;

    Point iterate(const Point& p, long n) const {
        double k = static_cast<double>(n);
        return {wrap01(p[0] + k * omega1), wrap01(p[1] + k * omega2)};
    }
    Point forward(const Point& p) const { return iterate(p, 1); }
    Point backward(const Point& p) const { return iterate(p, -1); }
    double distance(const Point& a, const Point& b) const {
        return std::max(circle_distance(a[0], b[0]), circle_distance(a[1], b[1]));
    }
    bool same(const Point& a, const Point& b) const { return distance(a, b) < 1e-13; }
    double displacement(long n) const {
        double k = static_cast<double>(n);
        return std::max(circle_distance(k * omega1, 0.0), circle_distance(k * omega2, 0.0));
    }
    Point random_point(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double a = u(rng);
        return {a, u(rng)};
    }
    std::vector<Point> grid(std::size_t count) const {
        std::vector<Point> g(count);
        for (std::size_t i = 0; i < count; ++i) {
            double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            g[i] = {t, wrap01(0.5 + static_cast<double>(i) * golden_mean)};
        }
        return g;
    }
    std::string name() const { return "torus2"; }
};

/// Adding machine on 2-adic sequences truncated to 64 digits. Digit i is bit i
/// of the word, so +1 with carry is unsigned increment. d(s,t) = 2^-(first
/// differing digit).
struct Odometer {
    using Point = std::uint64_t;

    bool minimal = true;
    bool almost_periodic = true;

    Point iterate(Point p, long n) const { return p + static_cast<std::uint64_t>(n); }
    Point forward(Point p) const { return p + 1; }
    Point backward(Point p) const { return p - 1; }
    double distance(Point a, Point b) const {
        if (a == b) return 0.0;
        return std::ldexp(1.0, -std::countr_zero(a - b));
    }
    bool same(Point a, Point b) const { return a == b; }
    double displacement(long n) const {
        auto k = static_cast<std::uint64_t>(n);
        return k == 0 ? 0.0 : std::ldexp(1.0, -std::countr_zero(k));
    }
    Point random_point(std::mt19937_64& rng) const { return rng(); }
    /// the first `count` integers; they hit every residue class mod 2^k for 2^k <= count
    std::vector<Point> grid(std::size_t count) const {
        std::vector<Point> g(count);
        for (std::size_t i = 0; i < count; ++i) g[i] = i;
        return g;
    }
    std::string name() const { return "odometer"; }

    /// sum_i digit_i 2^-(i+1), a continuous map onto [0,1]
    static double address(Point p) {
        std::uint64_t r = 0;
        for (int i = 0; i < 64; ++i) r |= ((p >> i) & 1ULL) << (63 - i);
        return std::ldexp(static_cast<double>(r), -64);
    }
};

/// First n in [1, horizon] with d(alpha^n, id) <= tol, or 0 when there is none.
template <BaseSystem Base>
long first_period(const Base& base, long horizon, double tol = 1e-12) {
    for (long n = 1; n <= horizon; ++n)
        if (base.displacement(n) <= tol) return n;
    return 0;
}

/// Largest gap between consecutive return times n in [1, horizon] with
/// d(alpha^n, id) < eps. Bounded gaps are the syndeticity signature of
/// almost periodicity.
template <BaseSystem Base>
long max_return_gap(const Base& base, double eps, long horizon) {
    long last = 0, worst = 0;
    for (long n = 1; n <= horizon; ++n) {
        if (base.displacement(n) < eps) {
            worst = std::max(worst, n - last);
            last = n;
        }
    }
    return std::max(worst, horizon - last);
}

}  // namespace blowup
