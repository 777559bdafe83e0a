#include <cmath>

#include "doctest.h"
#include "transobs/geometry.hpp"

using namespace transobs;

TEST_CASE("containment classification") {
    SpatialDomain iv = SpatialDomain::interval(-1.0, 1.0);
    CHECK(iv.classify(Vec::of(0.0)) == Region::interior);
    CHECK(iv.classify(Vec::of(1.0)) == Region::boundary);
    CHECK(iv.classify(Vec::of(-1.0)) == Region::boundary);
    CHECK(iv.classify(Vec::of(1.5)) == Region::exterior);
    CHECK(iv.classify(Vec::of(1.0 - 1e-13)) == Region::boundary);

    SpatialDomain ball = SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0);
    CHECK(ball.classify(Vec::of(3.0, 0.0)) == Region::exterior);
    CHECK(ball.classify(Vec::of(0.0, 0.0)) == Region::interior);
    CHECK(ball.classify(Vec::of(0.0, 1.0)) == Region::boundary);

    SpatialDomain box = SpatialDomain::box(Vec::of(-1.0, -2.0), Vec::of(1.0, 0.5));
    CHECK(box.classify(Vec::of(0.0, 0.0)) == Region::interior);
    CHECK(box.classify(Vec::of(1.0, 0.0)) == Region::boundary);
    CHECK(box.classify(Vec::of(0.0, 0.7)) == Region::exterior);

    CHECK_THROWS_AS(iv.classify(Vec::of(0.0, 0.0)), std::invalid_argument);  // dimension mismatch
}

TEST_CASE("the origin must be interior") {
    CHECK_THROWS_AS(SpatialDomain::interval(1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialDomain::ball(Vec::of(5.0, 0.0), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialDomain::interval(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialDomain::ball(Vec::of(0.0, 0.0), -2.0), std::invalid_argument);
}

TEST_CASE("outward normals") {
    SpatialDomain iv = SpatialDomain::interval(-1.0, 1.0);
    CHECK(iv.outward_normal(Vec::of(1.0))[0] == 1.0);
    CHECK(iv.outward_normal(Vec::of(-1.0))[0] == -1.0);
    CHECK_THROWS_AS(iv.outward_normal(Vec::of(0.5)), std::invalid_argument);

    SpatialDomain ball = SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0);
    Vec nu = ball.outward_normal(Vec::of(0.0, 1.0));
    CHECK(nu[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(nu[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm(nu) == doctest::Approx(1.0).epsilon(1e-14));

    SpatialDomain box = SpatialDomain::box(Vec::of(-1.0, -1.0), Vec::of(1.0, 1.0));
    Vec nb = box.outward_normal(Vec::of(0.3, 1.0));
    CHECK(nb[0] == 0.0);
    CHECK(nb[1] == 1.0);
}

TEST_CASE("diameter and exterior distance") {
    SpatialDomain iv = SpatialDomain::interval(-1.0, 1.0);
    CHECK(iv.diameter() == 2.0);
    CHECK(iv.exterior_distance(Vec::of(-19.0)) == doctest::Approx(18.0).epsilon(1e-15));
    CHECK_THROWS_AS(iv.exterior_distance(Vec::of(0.5)), std::invalid_argument);

    SpatialDomain ball = SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0);
    CHECK(ball.diameter() == 2.0);
    CHECK(ball.exterior_distance(Vec::of(-19.0, 0.0)) == doctest::Approx(18.0).epsilon(1e-15));
}

TEST_CASE("radius extrema closed forms") {
    SpatialDomain iv = SpatialDomain::interval(-1.0, 1.0);
    auto [mn, mx] = iv.radius_extrema(Vec::of(-19.0));
    CHECK(mn == doctest::Approx(324.0).epsilon(1e-15));
    CHECK(mx == doctest::Approx(400.0).epsilon(1e-15));
    auto [mn2, mx2] = iv.radius_extrema(Vec::of(-18.9));
    CHECK(mn2 == doctest::Approx(320.41).epsilon(1e-14));
    CHECK(mx2 == doctest::Approx(396.01).epsilon(1e-14));

    SpatialDomain ball = SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0);
    auto [bmn, bmx] = ball.radius_extrema(Vec::of(-19.0, 0.0));
    CHECK(bmn == doctest::Approx(324.0).epsilon(1e-14));
    CHECK(bmx == doctest::Approx(400.0).epsilon(1e-14));
}

TEST_CASE("radius extrema agree with dense brute force") {
    Vec x0_1 = Vec::of(-7.3);
    Vec x0_2 = Vec::of(4.1, -6.2);
    struct Case {
        SpatialDomain dom;
        Vec x0;
    } cases[] = {
        {SpatialDomain::interval(-1.0, 1.5), x0_1},
        {SpatialDomain::box(Vec::of(-1.0, -0.5), Vec::of(0.8, 1.2)), x0_2},
        {SpatialDomain::ball(Vec::of(0.1, -0.2), 1.3), x0_2},
    };
    // extrema of |x-x0|^2 over the closure sit on the boundary for
    // exterior x0; brute-force 10^4 boundary samples per domain
    for (const auto& c : cases) {
        auto [mn, mx] = c.dom.radius_extrema(c.x0);
        std::vector<Vec> samples;
        const int n = 10000;
        switch (c.dom.kind()) {
            case DomainKind::interval:
                samples.push_back(c.dom.lower());
                samples.push_back(c.dom.upper());
                break;
            case DomainKind::box: {
                Vec lo = c.dom.lower(), hi = c.dom.upper();
                for (int i = 0; i <= n / 4; ++i) {
                    double sx = lo[0] + (hi[0] - lo[0]) * 4.0 * i / n;
                    double sy = lo[1] + (hi[1] - lo[1]) * 4.0 * i / n;
                    samples.push_back(Vec::of(sx, lo[1]));
                    samples.push_back(Vec::of(sx, hi[1]));
                    samples.push_back(Vec::of(lo[0], sy));
                    samples.push_back(Vec::of(hi[0], sy));
                }
                break;
            }
            case DomainKind::ball:
                for (int i = 0; i < n; ++i) {
                    double th = 2.0 * std::acos(-1.0) * i / n;
                    samples.push_back(c.dom.center() +
                                      Vec::of(c.dom.radius() * std::cos(th), c.dom.radius() * std::sin(th)));
                }
                break;
        }
        double bmn = 1e300, bmx = 0.0;
        for (const Vec& p : samples) {
            double d2 = norm2(p - c.x0);
            bmn = std::min(bmn, d2);
            bmx = std::max(bmx, d2);
        }
        CHECK(std::abs(mn - bmn) <= 1e-6 * bmn);
        CHECK(std::abs(mx - bmx) <= 1e-6 * bmx);
    }
}

TEST_CASE("boundary crossings") {
    SpatialDomain iv = SpatialDomain::interval(-1.0, 1.0);
    SUBCASE("parabolic path exits at sqrt(3)") {
        auto path = [](double s) { return Vec::of(0.5 * s * s - 0.5); };
        auto cs = boundary_crossings(iv, path, 0.0, 3.0);
        REQUIRE(cs.size() == 1);
        CHECK(std::abs(cs[0].sigma - std::sqrt(3.0)) <= 1e-9);
        CHECK(std::abs(cs[0].point.x[0] - 1.0) <= 1e-9);
        CHECK(cs[0].point.normal[0] == 1.0);
        // outgoing crossing: path velocity dot normal >= 0
        double v = cs[0].sigma;  // d/ds of s^2/2
        CHECK(v * cs[0].point.normal[0] >= -1e-8);
    }
    SUBCASE("constant interior path never crosses") {
        auto path = [](double) { return Vec::of(0.0); };
        CHECK(boundary_crossings(iv, path, 0.0, 3.0).empty());
    }
    SUBCASE("radial unit-speed path in the unit ball") {
        SpatialDomain ball = SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0);
        auto path = [](double s) { return Vec::of(s, 0.0); };
        auto cs = boundary_crossings(ball, path, 0.0, 2.0);
        REQUIRE(cs.size() == 1);
        CHECK(std::abs(cs[0].sigma - 1.0) <= 1e-9);
        CHECK(std::abs(cs[0].point.x[0] - 1.0) <= 1e-9);
        CHECK(std::abs(cs[0].point.normal[0] - 1.0) <= 1e-6);
    }
    SUBCASE("re-entering path yields two sorted crossings") {
        auto path = [](double s) { return Vec::of(1.4 * std::sin(s)); };
        auto cs = boundary_crossings(iv, path, 0.0, 3.0);
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].sigma < cs[1].sigma);
        // sin crossing 1/1.4 going up, then coming back down
        CHECK(std::abs(cs[0].sigma - std::asin(1.0 / 1.4)) <= 1e-9);
    }
}

TEST_CASE("all supported domains contain the origin strictly") {
    CHECK(SpatialDomain::interval(-0.3, 2.0).classify(Vec::of(0.0)) == Region::interior);
    CHECK(SpatialDomain::box(Vec::of(-0.5, -3.0), Vec::of(4.0, 0.1)).classify(Vec::of(0.0, 0.0)) ==
          Region::interior);
    CHECK(SpatialDomain::ball(Vec::of(0.4, 0.0), 0.5).classify(Vec::of(0.0, 0.0)) == Region::interior);
}
