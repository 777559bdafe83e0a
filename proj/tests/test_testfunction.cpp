#include <cmath>

#include "doctest.h"
#include "transobs/rng.hpp"
#include "transobs/testfunction.hpp"

using namespace transobs;

namespace {

// independent finite-difference oracle for gradients / time derivatives
void check_derivatives_fd(const TestFunction& f, const Vec& x, double t, double tol) {
    const double h = 1e-5;
    TFEval e = f.eval(x, t);
    for (int i = 0; i < f.dim(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (f.value(xp, t) - f.value(xm, t)) / (2.0 * h);
        CHECK(std::abs(fd - e.grad[i]) <= tol);
    }
    double fdt = (f.value(x, t + h) - f.value(x, t - h)) / (2.0 * h);
    CHECK(std::abs(fdt - e.dt) <= tol);
}

}  // namespace

TEST_CASE("constants and zero") {
    TestFunction c = TestFunction::constant(1, 3.5);
    CHECK(c.value(Vec::of(0.2), 1.0) == 3.5);
    CHECK(c.gradient(Vec::of(0.2), 1.0)[0] == 0.0);
    CHECK(c.time_derivative(Vec::of(0.2), 1.0) == 0.0);
    TestFunction z = TestFunction::zero(2);
    CHECK(z.value(Vec::of(0.1, 0.2), 0.5) == 0.0);
}

TEST_CASE("gaussian bump closed forms") {
    TestFunction g = TestFunction::gaussian(1, 2.0, Vec::of(0.3), 0.5, 1.0);
    double x = -0.2, t = 0.4;
    double expected = std::exp(-2.0 * (x - 0.3) * (x - 0.3)) * std::exp(-0.5 * (t - 1.0) * (t - 1.0));
    CHECK(g.value(Vec::of(x), t) == doctest::Approx(expected).epsilon(1e-15));
    check_derivatives_fd(g, Vec::of(x), t, 1e-9);

    TestFunction g2 = TestFunction::gaussian(2, 1.0, Vec::of(0.1, -0.2), 0.2, 0.0);
    check_derivatives_fd(g2, Vec::of(0.4, 0.3), 0.7, 1e-9);
}

TEST_CASE("polynomial degree cap and derivatives") {
    PolyXT ok;
    ok.dim = 2;
    ok.terms.push_back({1.5, {2, 1, 0}, 1});  // 1.5 x^2 y t, total degree 4
    TestFunction p = TestFunction::polynomial(2, ok);
    check_derivatives_fd(p, Vec::of(0.5, -0.3), 0.8, 1e-8);

    PolyXT bad;
    bad.dim = 1;
    bad.terms.push_back({1.0, {3, 0, 0}, 2});  // degree 5
    CHECK_THROWS_WITH_AS(TestFunction::polynomial(1, bad), doctest::Contains("degree"),
                         std::invalid_argument);
}

TEST_CASE("product terms: gaussian times polynomial") {
    PolyXT poly;
    poly.dim = 1;
    poly.terms.push_back({1.0, {1, 0, 0}, 0});
    poly.terms.push_back({-0.5, {0, 0, 0}, 1});
    TFTerm term;
    term.coef = 0.7;
    term.has_space_gauss = true;
    term.ga = 1.3;
    term.gp = Vec::of(0.1);
    term.has_time_gauss = true;
    term.gb = 0.3;
    term.gq = 0.5;
    term.has_poly = true;
    term.poly = poly;
    TestFunction f(1, {term});
    double x = 0.4, t = 1.2;
    double gs = std::exp(-1.3 * (x - 0.1) * (x - 0.1));
    double gt = std::exp(-0.3 * (t - 0.5) * (t - 0.5));
    double pv = x - 0.5 * t;
    CHECK(f.value(Vec::of(x), t) == doctest::Approx(0.7 * gs * gt * pv).epsilon(1e-14));
    check_derivatives_fd(f, Vec::of(x), t, 1e-9);
}

TEST_CASE("transport operator application") {
    TestFunction g = TestFunction::gaussian(2, 1.0, Vec::of(0.0, 0.0), 0.4, 0.2);
    Vec x = Vec::of(0.3, -0.1);
    double t = 0.6;
    Vec H = Vec::of(1.2, -0.7);
    TFEval e = g.eval(x, t);
    CHECK(g.apply_transport(x, t, H) == doctest::Approx(e.dt + dot(H, e.grad)).epsilon(1e-15));
}

TEST_CASE("seeded ensembles are deterministic and differentiable") {
    SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
    auto e1 = make_test_ensemble(5, 99, dom, -2.0, 2.0);
    auto e2 = make_test_ensemble(5, 99, dom, -2.0, 2.0);
    REQUIRE(e1.size() == 5);
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1[i].value(Vec::of(0.3), 0.7) == e2[i].value(Vec::of(0.3), 0.7));
        check_derivatives_fd(e1[i], Vec::of(0.25), 0.45, 1e-7);
    }
    auto p1 = make_profile_ensemble(3, 7, dom);
    auto p2 = make_profile_ensemble(3, 7, dom);
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(p1[i].value(Vec::of(-0.4)) == p2[i].value(Vec::of(-0.4)));
}

TEST_CASE("vanishing bump is zero on the boundary") {
    SUBCASE("interval") {
        SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
        SpatialProfile b = SpatialProfile::vanishing_bump(dom);
        CHECK(std::abs(b.value(Vec::of(1.0))) <= 1e-15);
        CHECK(std::abs(b.value(Vec::of(-1.0))) <= 1e-15);
        CHECK(b.value(Vec::of(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("ball") {
        SpatialDomain dom = SpatialDomain::ball(Vec::of(0.2, 0.0), 0.9);
        SpatialProfile b = SpatialProfile::vanishing_bump(dom);
        CHECK(std::abs(b.value(Vec::of(1.1, 0.0))) <= 1e-13);
        CHECK(std::abs(b.value(Vec::of(0.2, 0.9))) <= 1e-13);
        CHECK(b.value(Vec::of(0.2, 0.0)) > 0.5);
    }
    SUBCASE("box") {
        SpatialDomain dom = SpatialDomain::box(Vec::of(-1.0, -0.5), Vec::of(0.5, 1.0));
        SpatialProfile b = SpatialProfile::vanishing_bump(dom);
        CHECK(std::abs(b.value(Vec::of(0.5, 0.3))) <= 1e-13);
        CHECK(std::abs(b.value(Vec::of(-0.2, -0.5))) <= 1e-13);
        CHECK(b.value(Vec::of(-0.25, 0.25)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}
