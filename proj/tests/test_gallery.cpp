#include <cmath>

#include "blowup/circle.hpp"
#include "blowup/errors.hpp"
#include "blowup/gallery.hpp"
#include "doctest.h"

using namespace blowup;

TEST_CASE("interval map with a 3-cycle") {
    PiecewiseLinearMap g = build_g();
    CHECK(g(0.0) == 0.5);
    CHECK(g(0.5) == 1.0);
    CHECK(g(1.0) == 0.0);
    IntervalMapScan s = scan_interval_map(g);
    CHECK(s.sign_changes == 1);
    CHECK(s.fixed_point == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.fixed_slope == doctest::Approx(0.4));
    CHECK(s.cycle_residual == 0.0);
    const double am = 0.65, ap = 0.75;
    CHECK(am < g(am));
    CHECK(g(am) < 0.7);
    CHECK(0.7 < g(ap));
    CHECK(g(ap) < ap);
}

TEST_CASE("surgery") {
    QpfSystem inner = make_qpf();
    SurgerySystem s = build_sharkovsky(inner);
    CHECK(s.boundary_residual(2000) < 1e-8);
    CHECK(three_cycle_residual(s, 200) < 1e-9);
    for (double t : {0.1, 0.3, 0.77}) {
        auto b = s.bands(t);
        CHECK(b.L < b.Lhat);
        CHECK(b.Lhat < b.Uhat);
        CHECK(b.Uhat < b.U);
        CHECK(s.glue(t, b.L) == doctest::Approx(s.a_minus()));
        CHECK(s.glue(t, b.U) == doctest::Approx(s.a_plus()));
        for (double x : {0.66, 0.7, 0.74}) CHECK(s.glue(t, s.unglue(t, x)) == doctest::Approx(x).epsilon(1e-12));
        auto o = s.outer(t, 0.2);
        CHECK(o.second == s.g()(0.2));
        CHECK(circle_distance(o.first, t + s.omega()) < 1e-15);
    }
    CHECK_THROWS_AS(build_sharkovsky(inner, 0.72, 0.75), PreconditionError);
    CHECK_THROWS_AS(build_sharkovsky(inner, 0.4, 0.75), PreconditionError);
}

TEST_CASE("no invariant curve after surgery, one without blow-up") {
    QpfSystem inner = make_qpf();
    CurveCertificate c = certify_no_invariant_curve(build_sharkovsky(inner), 30, 30, 200);
    CHECK(c.certified);
    CHECK(c.oscillation >= c.required);
    CHECK(c.required == doctest::Approx(0.8 * 0.25 * c.scale));
    CHECK(c.fixed_points == 1);
    CHECK(c.fixed_point_inside);
    CHECK(c.basin_fraction >= 0.99);
    QpfSystem bare = make_qpf(PinchMode::one_sided, -1);
    CurveCertificate cc = certify_no_invariant_curve(build_sharkovsky(bare), 30, 30, 0);
    CHECK(cc.oscillation < 1e-6);
    CHECK_FALSE(cc.certified);
}

TEST_CASE("point-distal torus map") {
    ReesSystem s = build_rees();
    CHECK(s.glue_residual(200) < 1e-8);
    MassInterval s0 = s.segment(0);
    CHECK(s0.hi - s0.lo == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.h(s.blown_fibre(0), 0.5 * (s0.lo + s0.hi)) == doctest::Approx(s.x_star()).epsilon(1e-12));
    auto a = s.fhat(s.blown_fibre(0), s0.lo), b = s.fhat(s.blown_fibre(0), s0.hi);
    CHECK(circle_distance(a.second, s.segment(1).lo) < 1e-12);
    CHECK(circle_distance(b.second, s.segment(1).hi) < 1e-12);
    for (double t : {0.1, 0.45, 0.9})
        for (double x : {0.0, 0.2, 0.6, 0.99}) {
            auto p = s.fhat(t, x);
            auto q = s.fhat_inv(p.first, p.second);
            CHECK(torus_distance(q, {t, x}) < 1e-8);
            auto fy = s.f(t, s.h(t, x));
            CHECK(torus_distance({p.first, s.h(p.first, p.second)}, fy) < 1e-8);
        }
}

TEST_CASE("distality probe") {
    ReesSystem s = build_rees();
    auto same = distality_probe(s, {0.2, 0.4}, {0.2, 0.4}, 10);
    CHECK(same.min_two_sided == 0.0);
    MassInterval g = s.segment(0);
    double t = s.blown_fibre(0);
    auto rec = distality_probe(s, {t, g.lo + 0.3 * (g.hi - g.lo)}, {t, g.lo + 0.6 * (g.hi - g.lo)}, 40);
    CHECK(rec.min_two_sided <= s.weights()(40) + 2.0 * s.tail());
    CHECK(rec.forward_distance.size() == 41);
    CHECK(rec.backward_distance.size() == 41);
    double xp = s.mu_cdf(0.8, s.x_star());
    auto far = distality_probe(s, {0.8, xp}, {0.8, wrap01(xp + 0.3)}, 200);
    CHECK(far.min_two_sided >= s.lebesgue() * circle_distance(s.h(0.8, xp), s.h(0.8, wrap01(xp + 0.3))));
}

TEST_CASE("torus map construction errors") {
    CHECK_THROWS_AS(build_rees(golden_mean, 1.0 - golden_mean), DomainError);
    CHECK_THROWS_AS(build_rees(golden_mean, 0.41421356237309503, 0.3, wrap01(-3.0 * 0.41421356237309503)),
                    BasepointError);
}
