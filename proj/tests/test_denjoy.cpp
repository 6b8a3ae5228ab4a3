#include <cmath>
#include <random>

#include "blowup/circle.hpp"
#include "blowup/denjoy.hpp"
#include "blowup/errors.hpp"
#include "blowup/rotation.hpp"
#include "doctest.h"

using namespace blowup;

TEST_CASE("nu has an atom a_0 = 1/4 at the basepoint") {
    HybridMeasure nu = build_nu(golden_mean, 0.1, WeightSequence(), 20);
    CHECK(cdf(nu, 0.1) - cdf_left(nu, 0.1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cdf(nu, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nu.atoms().size() == 41);
}

TEST_CASE("N = -1 gives Lebesgue and h = id") {
    DenjoySystem sys(golden_mean, 0.1, WeightSequence(), -1);
    CHECK(sys.nu().atoms().empty());
    for (int i = 0; i <= 10; ++i) CHECK(sys.h(i / 10.0) == doctest::Approx(i / 10.0).epsilon(1e-12));
    CHECK(sys.forward(0.2) == doctest::Approx(wrap01(0.2 + golden_mean)).epsilon(1e-12));
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(build_nu(0.25, 0.1, WeightSequence(), 5), DomainError);
    double bad_x0 = wrap01(-3.0 * golden_mean);
    try {
        build_nu(golden_mean, bad_x0, WeightSequence(), 5);
        FAIL("expected a basepoint error");
    } catch (const BasepointError& e) {
        CHECK_NOTHROW(build_nu(golden_mean, e.suggested_basepoint, WeightSequence(), 5));
    }
}

TEST_CASE("the homeomorphism") {
    DenjoySystem sys;
    const double w = sys.omega();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double semi = 0.0, inv = 0.0;
    for (int i = 0; i < 2000; ++i) {
        double y = unit(rng);
        semi = std::max(semi, circle_distance(sys.h(sys.forward(y)), sys.h(y) + w));
        inv = std::max(inv, circle_distance(sys.inverse(sys.forward(y)), y));
    }
    CHECK(semi < 1e-9);
    CHECK(inv < 1e-9);

    SUBCASE("gaps map onto gaps") {
        for (long n = -10; n < 10; ++n) {
            CHECK(circle_distance(sys.forward(sys.gap(n).c), sys.gap(n + 1).c) < 1e-9);
            CHECK(circle_distance(sys.forward(sys.gap(n).d), sys.gap(n + 1).d) < 1e-9);
            CHECK(sys.gap(n).length() == doctest::Approx(sys.weights()(n)).epsilon(1e-12));
        }
        double total = 0.0;
        for (const Gap& g : sys.gaps()) total += g.length();
        CHECK(std::fabs(total - 0.5) < 1e-9);
    }
    SUBCASE("h collapses each gap to its orbit point") {
        const Gap& g = sys.gap(3);
        CHECK(sys.h(0.5 * (g.c + g.d)) == doctest::Approx(sys.orbit_point(3)).epsilon(1e-12));
        CHECK(sys.gap_containing(0.5 * (g.c + g.d)) == 3);
        CHECK(sys.in_open_gap(0.5 * (g.c + g.d)));
        CHECK_FALSE(sys.in_open_gap(g.c, 1e-12));
    }
    SUBCASE("map oracles agree with the system") {
        auto f = denjoy_map(sys);
        auto h = denjoy_h(sys);
        CHECK(f.circle);
        CHECK(f.forward(0.37) == sys.forward(0.37));
        CHECK(f.inverse(0.37) == sys.inverse(0.37));
        CHECK(h(0.37) == sys.h(0.37));
    }
}

TEST_CASE("rotation numbers") {
    const double w = golden_mean;
    CHECK(std::fabs(rotation_number([&](double y) { return y + w; }, 10000) - w) <= 1e-4);
    CHECK(rotation_number([](double y) { return y; }, 1000) == 0.0);
    DenjoySystem sys;
    CHECK(std::fabs(rotation_number([&](double y) { return sys.lift(y); }, 10000) - w) < 2e-3);
}

TEST_CASE("wandering interval and minimal set") {
    DenjoySystem sys;
    CHECK(wandering_margin(sys, 100) > 0.0);
    CHECK(periodic_defect(sys, 10, 200) > 0.0);
    auto one = minimal_set_sample(sys, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == sys.gap(0).c);
    auto s = minimal_set_sample(sys, 20000);
    long inside = 0;
    for (double y : s) inside += sys.in_open_gap(y, 1e-12) ? 1 : 0;
    CHECK(inside == 0);
}
