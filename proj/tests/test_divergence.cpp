#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "algae/divergence.hpp"
#include "algae/errors.hpp"
#include "algae/rng.hpp"

using namespace algae;

namespace {

Occupancy two_point(double p0, double p1) {
    Vector w(2);
    w << p0, p1;
    return Occupancy(2, 1, w);
}

} // namespace

TEST_CASE("quadratic pair") {
    const DivergencePair div = quadratic();
    CHECK(div.f(2.0) == doctest::Approx(2.0));
    CHECK(div.f_star(0.0) == doctest::Approx(0.0));
    CHECK(div.f_star_prime(div.f_prime(3.7)) == doctest::Approx(3.7));
    div.check_consistency();
}

TEST_CASE("polynomial pair") {
    SUBCASE("p = 2 coincides with quadratic") {
        const DivergencePair poly = polynomial(2.0);
        const DivergencePair quad = quadratic();
        for (double x = -5.0; x <= 5.0; x += 0.25) {
            CHECK(std::abs(poly.f(x) - quad.f(x)) <= 1e-12);
            CHECK(std::abs(poly.f_star(x) - quad.f_star(x)) <= 1e-12);
        }
    }
    SUBCASE("p = 1.5 exposes the Holder conjugate q = 3") {
        const DivergencePair poly = polynomial(1.5);
        CHECK(poly.f(2.0) == doctest::Approx(8.0 / 3.0));
        for (double x = -2.0; x <= 2.0; x += 0.5) {
            CHECK(std::abs(poly.f_star_prime(poly.f_prime(x)) - x) <= 1e-8);
        }
        poly.check_consistency();
    }
    SUBCASE("the exponent family verifies conjugacy on the grid") {
        for (double p : {1.5, 3.0, 4.0}) polynomial(p).check_consistency();
    }
    SUBCASE("p <= 1 is rejected") {
        CHECK_THROWS_AS(polynomial(1.0), ValidationError);
        CHECK_THROWS_AS(polynomial(0.5), ValidationError);
    }
}

TEST_CASE("divergence names") {
    CHECK(divergence_from_name("quadratic").name() == "quadratic");
    CHECK(divergence_from_name("polynomial:1.5").f(2.0) == doctest::Approx(8.0 / 3.0));
    CHECK_THROWS_AS(divergence_from_name("kl"), ValidationError);
    CHECK_THROWS_AS(divergence_from_name("polynomial:x"), ValidationError);
}

TEST_CASE("f divergence") {
    SUBCASE("identical distributions pin f(1)") {
        const Occupancy d = two_point(0.5, 0.5);
        CHECK(f_divergence(d, d, quadratic()) == doctest::Approx(0.5));
        CHECK(f_divergence(d, d, polynomial(1.5)) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("two-point arithmetic") {
        const double value = f_divergence(two_point(0.75, 0.25), two_point(0.5, 0.5), quadratic());
        CHECK(value == doctest::Approx(0.625).epsilon(1e-12));
    }
    SUBCASE("coverage violation names the offending pair") {
        try {
            f_divergence(two_point(0.5, 0.5), two_point(1.0, 0.0), quadratic());
            FAIL("expected CoverageError");
        } catch (const CoverageError& e) {
            CHECK(e.state() == 1);
            CHECK(e.action() == 0);
        }
    }
    SUBCASE("jointly-zero pairs contribute nothing") {
        CHECK(f_divergence(two_point(1.0, 0.0), two_point(1.0, 0.0), quadratic()) ==
              doctest::Approx(0.5));
    }
}

TEST_CASE("variational form") {
    const Occupancy d_pi = two_point(0.75, 0.25);
    const Occupancy d_D = two_point(0.5, 0.5);
    const DivergencePair div = quadratic();
    const double divergence = f_divergence(d_pi, d_D, div);

    SUBCASE("zero dual gives zero") {
        CHECK(variational_gap(d_pi, d_D, ValueTable::zeros(2, 1), div) == doctest::Approx(0.0));
        CHECK(divergence >= 0.0);
    }
    SUBCASE("the plug-in optimum attains the divergence") {
        Vector x(2);
        x << div.f_prime(1.5), div.f_prime(0.5);
        CHECK(variational_gap(d_pi, d_D, ValueTable(2, 1, x), div) ==
              doctest::Approx(divergence).epsilon(1e-9));
    }
    SUBCASE("random duals never exceed it") {
        RandomStream stream(5);
        for (int k = 0; k < 200; ++k) {
            Vector x(2);
            x << stream.uniform(-4.0, 4.0), stream.uniform(-4.0, 4.0);
            CHECK(variational_gap(d_pi, d_D, ValueTable(2, 1, x), div) <= divergence + 1e-9);
        }
    }
}

TEST_CASE("fenchel-young inequality on the grid") {
    for (double p : {0.0, 1.5, 2.0, 3.0, 4.0}) {
        const DivergencePair div = p == 0.0 ? quadratic() : polynomial(p);
        for (double x = -5.0; x <= 5.0; x += 0.25) {
            for (double y = -5.0; y <= 5.0; y += 0.25) {
                CHECK(x * y <= div.f(x) + div.f_star(y) + 1e-9);
            }
            const double y_star = div.f_prime(x);
            CHECK(std::abs(div.f(x) + div.f_star(y_star) - x * y_star) <= 1e-8);
        }
    }
}

TEST_CASE("conjugacy against the maximization oracle") {
    for (double p : {0.0, 1.5, 2.0, 3.0, 4.0}) {
        const DivergencePair div = p == 0.0 ? quadratic() : polynomial(p);
        for (double x : {-3.0, -1.2, 0.0, 0.4, 2.5}) {
            const double bound = 1.0 + 2.0 * std::abs(div.f_prime(3.0));
            const double oracle = conjugate_by_maximization(
                [&](double y) { return div.f_star(y); }, x, -bound, bound);
            CHECK(std::abs(div.f(x) - oracle) <= 1e-8);
        }
    }
}
