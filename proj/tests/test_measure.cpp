#include <algorithm>
#include <cmath>
#include <random>

#include "blowup/errors.hpp"
#include "blowup/measure.hpp"
#include "blowup/weights.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

// half an atom at 1/2, half Lebesgue
HybridMeasure half_atom() {
    return HybridMeasure({{0.5, 0.5}}, [](double y) { return 0.5 * y; });
}

}  // namespace

TEST_CASE("cdf and cdf_left on an atom plus Lebesgue") {
    HybridMeasure m = half_atom();
    CHECK(cdf(m, 0.49) == doctest::Approx(0.245).epsilon(1e-15));
    CHECK(cdf_left(m, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cdf(m, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(cdf(m, 0.5) - cdf_left(m, 0.5) == doctest::Approx(m.atom_mass(0.5)));
    CHECK(cdf(m, 1.0) == doctest::Approx(1.0));
    CHECK(cdf(m, 0.0) == 0.0);
}

TEST_CASE("quantile examples") {
    HybridMeasure leb = HybridMeasure::lebesgue();
    CHECK(quantile(leb, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
    HybridMeasure m = half_atom();
    CHECK(quantile(m, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    for (double x : {0.25, 0.3, 0.6, 0.75}) CHECK(quantile(m, x) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(quantile(m, 0.1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("preimage intervals") {
    HybridMeasure m = half_atom();
    MassInterval p = preimage_interval(m, 0.5);
    CHECK(p.lo == doctest::Approx(0.25));
    CHECK(p.hi == doctest::Approx(0.75));
    MassInterval z = preimage_interval(HybridMeasure::lebesgue(), 0.0);
    CHECK(z.lo == 0.0);
    CHECK(z.hi == 0.0);
    MassInterval d = preimage_interval(m, 0.3);
    CHECK(d.lo == d.hi);
}

TEST_CASE("errors") {
    HybridMeasure m = half_atom();
    CHECK_THROWS_AS(cdf(m, 1.5), DomainError);
    CHECK_THROWS_AS(cdf_left(m, -0.1), DomainError);
    CHECK_THROWS_AS(quantile(m, 1.1), DomainError);
    HybridMeasure gappy({{0.5, 0.5}}, [](double y) { return 0.5 * std::min(y, 0.5); }, 0.25);
    CHECK_FALSE(gappy.full_support());
    CHECK_THROWS_AS(quantile(gappy, 0.3), PreconditionError);
    CHECK_THROWS_AS(HybridMeasure({{0.2, 0.3}, {0.2, 0.2}}, [](double y) { return 0.5 * y; }), DomainError);
    CHECK_THROWS_AS(HybridMeasure({{1.2, 0.5}}, [](double y) { return 0.5 * y; }), DomainError);
    CHECK_THROWS_AS(HybridMeasure({{0.2, -0.5}}, [](double y) { return 1.5 * y; }), DomainError);
    CHECK_THROWS_AS(HybridMeasure({{0.2, 0.5}}, [](double y) { return 0.2 * y; }), DomainError);
}

TEST_CASE("push-forward") {
    SUBCASE("identity leaves the measure unchanged") {
        HybridMeasure m = half_atom();
        HybridMeasure p = pushforward(m, MonotoneMapOracle::identity());
        for (int i = 0; i <= 100; ++i) CHECK(cdf(p, i / 100.0) == cdf(m, i / 100.0));
    }
    SUBCASE("a Dirac mass moves with a circle shift") {
        HybridMeasure d({{0.2, 1.0}}, [](double) { return 0.0; });
        HybridMeasure p = pushforward(d, MonotoneMapOracle::rotation(0.3));
        REQUIRE(p.atoms().size() == 1);
        CHECK(p.atoms()[0].position == doctest::Approx(0.5));
        CHECK(p.atoms()[0].mass == 1.0);
    }
    SUBCASE("circle shift of an atom plus Lebesgue keeps the mass") {
        HybridMeasure p = pushforward(half_atom(), MonotoneMapOracle::rotation(0.7));
        CHECK(cdf(p, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(p.atoms().size() == 1);
        const double at = p.atoms()[0].position;
        CHECK(at == doctest::Approx(0.2));
        CHECK(cdf(p, at) - cdf_left(p, at) == doctest::Approx(0.5));
        CHECK(cdf(p, 0.1) == doctest::Approx(0.05));
    }
    SUBCASE("Lebesgue under squaring has cdf sqrt(y), matched against a 1e6 sample") {
        MonotoneMapOracle sq{[](double y) { return y * y; }, [](double y) { return std::sqrt(y); }, false};
        HybridMeasure p = pushforward(HybridMeasure::lebesgue(), sq);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int n = 1000000;
        std::vector<double> s(n);
        for (double& v : s) {
            double u = unit(rng);
            v = u * u;
        }
        std::sort(s.begin(), s.end());
        double ks = 0.0, closed = 0.0;
        for (int i = 0; i <= 100; ++i) {
            double y = i / 100.0;
            double emp = static_cast<double>(std::upper_bound(s.begin(), s.end(), y) - s.begin()) / n;
            ks = std::max(ks, std::fabs(emp - cdf(p, y)));
            closed = std::max(closed, std::fabs(cdf(p, y) - std::sqrt(y)));
        }
        CHECK(closed < 1e-15);
        CHECK(ks < 3e-3);  // about 2 / sqrt(n) at 1e6 samples
    }
    SUBCASE("missing oracle") {
        MonotoneMapOracle broken{[](double y) { return y; }, nullptr, false};
        CHECK_THROWS_AS(pushforward(half_atom(), broken), OracleError);
    }
}

TEST_CASE("quantile is a Galois inverse of the cdf on random hybrid measures") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = 1e-9;
    long bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int k = static_cast<int>(unit(rng) * 6);
        std::vector<Atom> atoms;
        double atom_mass = 0.0;
        for (int i = 0; i < k; ++i) {
            double w = 0.1 * unit(rng) + 1e-3;
            atoms.push_back({unit(rng), w});
            atom_mass += w;
        }
        double ac = 1.0 - atom_mass;
        double p = 0.5 + 2.0 * unit(rng);
        HybridMeasure m(atoms, [ac, p](double y) { return ac * std::pow(y, p); });
        for (int j = 0; j < 5; ++j) {
            double x = unit(rng), y = unit(rng);
            double q = quantile(m, x, 1e-12);
            bool lhs = q <= y, rhs = x <= cdf(m, y);
            if (lhs != rhs && std::fabs(q - y) > tol && std::fabs(x - cdf(m, y)) > tol) ++bad;
            if (cdf(m, q) < x - tol) ++bad;
        }
        for (const Atom& a : m.atoms()) {
            MassInterval iv = preimage_interval(m, a.position);
            if (std::fabs((iv.hi - iv.lo) - a.mass) > 2e-12) ++bad;
        }
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            double q = quantile(m, i / 200.0);
            if (q < prev) ++bad;
            prev = q;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("weights") {
    WeightSequence w;
    CHECK(w(0) == 0.25);
    CHECK(w(-2) == doctest::Approx(0.25 / 9.0));
    CHECK(w.total() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.b() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.tail(40) < 1e-18);
    CHECK(w.tail(-1) == doctest::Approx(w.total()));
    double s = 0.0;
    for (long n = -5; n <= 5; ++n) s += w(n);
    CHECK(w.partial(5) == doctest::Approx(s).epsilon(1e-15));
    CHECK(w.partial(5) + w.tail(5) == doctest::Approx(w.total()).epsilon(1e-15));
    CHECK(w.tail(3) > w.tail(4));
    CHECK_THROWS_AS(WeightSequence(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(WeightSequence(0.25, 1.0), DomainError);
    CHECK_THROWS_AS(WeightSequence(0.6, 1.0 / 3.0), DomainError);
}
