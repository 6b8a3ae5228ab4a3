#include <cmath>
#include <random>

#include "blowup/circle.hpp"
#include "blowup/errors.hpp"
#include "blowup/qpf.hpp"
#include "blowup/rotation.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

const QpfSystem& one_sided() {
    static const QpfSystem sys = make_qpf();
    return sys;
}

}  // namespace

TEST_CASE("fibre measure over theta* and elsewhere") {
    const QpfSystem& sys = one_sided();
    const double ts = sys.pinch().theta_star;
    const double g = sys.gamma(ts);
    CHECK(sys.mu0_cdf(ts, g) == 1.0);
    CHECK(sys.mu0_cdf(ts, g - 1e-9) == 0.0);
    const double t = 0.7;
    const double lo = sys.pinch().psi(t), hi = sys.pinch().phi(t);
    CHECK(sys.mu0_cdf(t, lo) == doctest::Approx(0.0));
    CHECK(sys.mu0_cdf(t, hi) == doctest::Approx(1.0));
    CHECK(sys.mu0_cdf(t, 0.5 * (lo + hi)) == doctest::Approx(0.5));
    CHECK(sys.mun_cdf(0, t, 0.51) == sys.mu0_cdf(t, 0.51));
    for (long n : {-3L, -1L, 2L, 5L}) {
        double back = wrap01(t - static_cast<double>(n) * sys.base().omega);
        CHECK(sys.mun_cdf(n, t, sys.gamma(t)) == doctest::Approx(sys.mu0_cdf(back, sys.gamma(back))).epsilon(1e-12));
    }
    CHECK(sys.mu_cdf(t, 0.0) == doctest::Approx(0.0));
    CHECK(sys.mu_cdf(t, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fibre CDF is continuous off the blown-up orbit") {
    const QpfSystem& sys = one_sided();
    double worst = 0.0;
    double prev = sys.mu_cdf(0.7, 0.0);
    for (int i = 1; i <= 100000; ++i) {
        double v = sys.mu_cdf(0.7, i / 100000.0);
        worst = std::max(worst, v - prev);
        prev = v;
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("segments and the factor map") {
    const QpfSystem& sys = one_sided();
    MassInterval s0 = sys.segment(0);
    CHECK(s0.hi - s0.lo == doctest::Approx(0.25).epsilon(1e-12));
    for (long n = -10; n <= 10; ++n) {
        MassInterval s = sys.segment(n);
        CHECK(std::fabs((s.hi - s.lo) - sys.weights()(n)) < 1e-12);
    }
    MassInterval edge = sys.segment(41);
    CHECK(edge.hi == edge.lo);
    CHECK_THROWS_AS(sys.segment(42), DomainError);
    const double ts = sys.pinch().theta_star;
    CHECK(sys.h_fibre(ts, 0.5 * (s0.lo + s0.hi)) == doctest::Approx(sys.gamma(ts)).epsilon(1e-12));
    CHECK_THROWS_AS(sys.h_fibre(0.2, 1.5), DomainError);
    CHECK(sys.h_truncated(40, 0.2, 0.3) == sys.h_fibre(0.2, 0.3));
    CHECK_THROWS_AS(sys.h_truncated(41, 0.2, 0.3), DomainError);
    CHECK(sys.h_truncated(-1, 0.2, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("f-hat on segments and elsewhere") {
    const QpfSystem& sys = one_sided();
    const double ts = sys.pinch().theta_star;
    MassInterval s0 = sys.segment(0), s1 = sys.segment(1);
    auto lo = sys.fhat(ts, s0.lo), hi = sys.fhat(ts, s0.hi), mid = sys.fhat(ts, 0.5 * (s0.lo + s0.hi));
    CHECK(lo.x == doctest::Approx(s1.lo).epsilon(1e-12));
    CHECK(hi.x == doctest::Approx(s1.hi).epsilon(1e-12));
    CHECK(mid.x == doctest::Approx(0.5 * (s1.lo + s1.hi)).epsilon(1e-12));
    CHECK(sys.base().same(lo.theta, sys.blown_fibre(1)));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double semi = 0.0, inv = 0.0;
    for (int i = 0; i < 500; ++i) {
        double t = unit(rng), x = unit(rng);
        auto p = sys.fhat(t, x);
        semi = std::max(semi, std::fabs(sys.h_fibre(p.theta, p.x) - sys.f(t, sys.h_fibre(t, x))));
        inv = std::max(inv, std::fabs(sys.fhat_inv(p.theta, p.x).x - x));
    }
    CHECK(semi < 1e-8);
    CHECK(inv < 1e-8);
}

TEST_CASE("discontinuity jump") {
    JumpEstimate j = discontinuity_jump(one_sided());
    CHECK(j.converged);
    CHECK(std::fabs(j.jump - 0.25) < 1e-6);
    QpfSystem bare = make_qpf(PinchMode::one_sided, -1);
    CHECK(std::fabs(discontinuity_jump(bare).jump) < 1e-6);
    QpfSystem osc = make_qpf(PinchMode::oscillating);
    CHECK_THROWS_AS(discontinuity_jump(osc), PreconditionError);
}

TEST_CASE("parametrization of the pinched set") {
    const QpfSystem& sys = one_sided();
    PinchedSetParametrization P(sys);
    const double ts = sys.pinch().theta_star;
    CHECK(P.eta(0.0) == 0.0);
    CHECK(P.eta_hat(P.eta(0.6)) == doctest::Approx(0.6).epsilon(1e-9));
    // the jump of eta at theta* is a_0
    CHECK(P.eta(ts + 1e-12) - P.eta(ts) == doctest::Approx(0.25).epsilon(1e-6));
    std::pair<double, double> prev{-1.0, 0.0};
    long order = 0;
    for (int i = 0; i < 2000; ++i) {
        double t = i / 2000.0;
        auto p = P.xi(t);
        if (i > 0 && !(p.first > prev.first || (p.first == prev.first && p.second < prev.second))) ++order;
        CHECK(circle_distance(P.xi_inv(p.first, p.second), t) < 1e-9);
        prev = p;
    }
    CHECK(order == 0);
    CHECK(std::fabs(rotation_number([&](double t) { return P.conjugated_lift(t); }, 2000) - golden_mean) < 2e-3);
}

TEST_CASE("global attractor") {
    const QpfSystem& sys = one_sided();
    const double ts = sys.pinch().theta_star;
    std::vector<double> thetas{0.05, 0.55, ts};
    auto env = sys.global_attractor(thetas, 30);
    REQUIRE(env.lower.size() == 31);
    CHECK(env.upper[0][0] - env.lower[0][0] > 0.5);
    CHECK(env.upper[30][0] - env.lower[30][0] < 1e-3);
    CHECK(env.upper[30][1] - env.lower[30][1] < 1e-3);
    CHECK(env.upper[30][2] - env.lower[30][2] >= 0.25 - 1e-6);
    CHECK_THROWS_AS(sys.global_attractor(thetas, 1, 0.0, 1.0), PreconditionError);
}

TEST_CASE("construction errors") {
    // theta*_2 lands on the cut point
    CHECK_THROWS_AS(make_qpf(PinchMode::one_sided, 40, WeightSequence(), golden_mean, wrap01(-2.0 * golden_mean)),
                    BasepointError);
    CHECK_THROWS_AS(make_qpf(PinchMode::one_sided, -2), DomainError);
    CHECK_THROWS_AS(make_qpf(PinchMode::one_sided, 5, WeightSequence(), 0.5), AperiodicityError);
}

TEST_CASE("minimal set without blow-up is the curve") {
    QpfSystem bare = make_qpf(PinchMode::one_sided, -1);
    double worst = 0.0;
    for (const auto& s : bare.minimal_set_sample(2000)) worst = std::max(worst, std::fabs(s.x - bare.gamma(s.theta)));
    CHECK(worst < 1e-12);
}
