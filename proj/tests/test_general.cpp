#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/general.hpp"
#include "blowup/qpf.hpp"
#include "blowup/reference.hpp"
#include "doctest.h"

using namespace blowup;

TEST_CASE("distance-based pinch functions") {
    auto forced = default_qpf_system();
    auto seq = default_sequences(forced.base, 0.3);
    auto pinch = make_pinch_general(forced.base, forced.gamma, seq);
    for (double s : seq.S) CHECK(pinch.phi(s) == forced.gamma(s));
    for (double t : seq.T) CHECK(pinch.psi(t) == forced.gamma(t));
    for (double t : {0.6, 0.8, 0.05}) {
        double brute = circle_distance(t, 0.3);
        for (double s : seq.S) brute = std::min(brute, circle_distance(t, s));
        CHECK(pinch.phi(t) - forced.gamma(t) == doctest::Approx(seq.scale * brute).epsilon(1e-14));
        CHECK(pinch.psi(t) <= forced.gamma(t));
    }
    auto big = seq;
    big.scale = 5.0;
    CHECK_THROWS_AS(make_pinch_general(forced.base, forced.gamma, big), ScaleError);
    auto clash = seq;
    clash.T.front() = clash.S.front();
    CHECK_THROWS_AS(make_pinch_general(forced.base, forced.gamma, clash), PreconditionError);
}

TEST_CASE("periodic theta* is rejected") {
    auto forced = default_qpf_system(0.25);
    auto seq = default_sequences(forced.base, 0.3);
    auto pinch = make_pinch_general(forced.base, forced.gamma, seq);
    CHECK_THROWS_AS(blowup_general(forced.base, forced, pinch, WeightSequence(), 10), AperiodicityError);
}

TEST_CASE("odometer arithmetic") {
    Odometer od;
    CHECK(od.forward(~0ULL) == 0ULL);
    CHECK(od.distance(0, 4) == 0.25);
    CHECK(od.distance(5, 5) == 0.0);
    CHECK(od.displacement(8) == doctest::Approx(1.0 / 8.0));
    CHECK(Odometer::address(1) == 0.5);
    CHECK(max_return_gap(od, 0.01, 100000) == recorded_return_gap("odometer", 0.01));
}

TEST_CASE("circle blow-up through the general path matches the direct series") {
    auto sys = make_circle_general(40);
    CrossCheck c = cross_check_direct(sys, 40, 9);
    CHECK(c.evaluations == 120);
    CHECK(c.worst() < 1e-9);
}

TEST_CASE("torus system lifted from the circle agrees with it") {
    auto forced = default_qpf_system();
    auto seq = default_sequences(forced.base, default_torus_star[0]);
    auto circle = blowup_general(forced.base, forced, make_pinch_general(forced.base, forced.gamma, seq),
                                 WeightSequence(), 40);
    auto torus = lift_to_torus(circle, 0.41421356237309503, default_torus_star[1]);
    CrossCheck c = cross_check_lift(circle, torus, 100, 4);
    CHECK(c.worst() < 1e-9);
}

TEST_CASE("odometer blow-up") {
    auto sys = make_odometer_general(20);
    MassInterval s0 = sys.segment(0);
    CHECK(s0.hi - s0.lo == doctest::Approx(0.25).epsilon(1e-12));
    auto a = sys.fhat(sys.blown_fibre(0), s0.lo);
    CHECK(a.x == doctest::Approx(sys.segment(1).lo).epsilon(1e-12));
    CHECK(cross_check_direct(sys, 30, 2).worst() < 1e-9);
    SuiteOptions opt;
    opt.fibres = 30;
    opt.grid = 200;
    opt.random_points = 500;
    opt.generic_fibres = 100;
    opt.curve_sample = 200;
    VerificationReport r("odometer");
    check_blowup_properties(sys, sequence_approach(default_sequences(sys.base(), default_odometer_star)), opt, r);
    for (const auto& e : r.entries()) CHECK_MESSAGE(e.pass, e.id);
}

TEST_CASE("N = -1 skips the segment properties") {
    auto sys = make_torus_general(-1);
    SuiteOptions opt;
    opt.fibres = 10;
    opt.grid = 100;
    opt.random_points = 200;
    opt.generic_fibres = 50;
    opt.curve_sample = 100;
    VerificationReport r("torus2");
    check_blowup_properties(sys, sequence_approach(default_sequences(sys.base(), default_torus_star)), opt, r);
    CHECK(r.find("segment.width") == nullptr);
    CHECK(r.all_pass());
    auto j = r.to_json();
    CHECK(j["skipped"].size() >= 3);
}
