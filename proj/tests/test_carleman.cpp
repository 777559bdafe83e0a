#include <cmath>

#include "doctest.h"
#include "transobs/carleman.hpp"
#include "transobs/pipeline.hpp"
#include "transobs/transport.hpp"

using namespace transobs;

namespace {

VectorField make_field(std::initializer_list<const char*> descriptors, double T) {
    std::vector<ComponentFn> comps;
    for (const char* d : descriptors) comps.push_back(parse_component(d));
    return VectorField(std::move(comps), T, T);
}

AdmissibilityCertificate s1_cert() {
    return build_certificate(SpatialDomain::interval(-1.0, 1.0), make_field({"poly:0,1"}, 5.0), 0.8,
                             Mode::degenerate, 0.05);
}

AdmissibilityCertificate s3_cert() {
    return build_certificate(SpatialDomain::interval(-1.0, 1.0), make_field({"poly:1,1"}, 16.0), 0.8,
                             Mode::nondegenerate, 0.05);
}

}  // namespace

TEST_CASE("weight evaluation closed forms") {
    SUBCASE("degenerate at the origin slice") {
        VectorField field = make_field({"poly:0,1"}, 5.0).reflect_extend();
        CarlemanWeight w{Mode::degenerate, Vec::of(-18.9), 4.018, 396.01};
        WeightEval e = weight_eval(w, field, Vec::of(0.0), 0.0);
        CHECK(e.value == doctest::Approx(357.21).epsilon(1e-12));
        CHECK(e.shifted == doctest::Approx(357.21 - 396.01).epsilon(1e-10));
        CHECK(e.A == 0.0);  // H(0) = 0 and t = 0
        CHECK(e.A2 == doctest::Approx(-2.0 * 4.018 + 2.0 * 18.9).epsilon(1e-12));
    }
    SUBCASE("A phi is odd in t under the reflected field at x = 0") {
        VectorField field = make_field({"poly:0,1"}, 5.0).reflect_extend();
        CarlemanWeight w{Mode::degenerate, Vec::of(-18.9), 4.018, 396.01};
        for (double t : {0.3, 1.2, 2.9}) {
            double ap = weight_eval(w, field, Vec::of(0.0), t).A;
            double am = weight_eval(w, field, Vec::of(0.0), -t).A;
            CHECK(ap == doctest::Approx(-am).epsilon(1e-13));
        }
    }
    SUBCASE("non-degenerate") {
        VectorField field = make_field({"poly:1,1"}, 16.0);
        CarlemanWeight w{Mode::nondegenerate, Vec::of(-18.9), 7.3745, 396.01};
        WeightEval e = weight_eval(w, field, Vec::of(0.0), 0.0);
        CHECK(e.value == doctest::Approx(357.21).epsilon(1e-12));
        CHECK(e.A == doctest::Approx(-7.3745 + 2.0 * 18.9).epsilon(1e-12));
        CHECK(e.A2 == doctest::Approx(2.0 * 18.9 + 2.0).epsilon(1e-12));
    }
}

TEST_CASE("weighted term integrals against a 40-digit quadrature reference") {
    // separable gaussian case, H(t) = t reflected, beta = 0.5, x0 = -3,
    // shift = 16, s = 0.25; references from independent adaptive
    // quadrature at 40 digits
    VectorField field = make_field({"poly:0,1"}, 2.0).reflect_extend();
    CarlemanWeight weight{Mode::degenerate, Vec::of(-3.0), 0.5, 16.0};
    TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(0.25), 0.25, 0.0);
    CylinderGrids grids = cylinder_grids(SpatialDomain::interval(-1.0, 1.0), -1.0, 1.0, 4);
    CarlemanTerms terms = carleman_terms(w, field, weight, grids, 0.25, false, 2);
    auto close = [](double got, double expect) {
        CHECK(std::abs(got - expect) <= 1e-10 * std::abs(expect));
    };
    close(terms.vol_w2.direct, 0.249502375116960641069288);
    close(terms.vol_Aw2.direct, 0.1348042662542705760226346);
    close(terms.vol_A2w2.direct, 1.703378553578147475735076);
    close(terms.vol_Asq_w2.direct, 2.700559488772738773440086);
    close(terms.sigma_flux.direct, 0.9850655290479427211411904);
    close(terms.end_hi.direct, 0.4642918469085272960358685);
    close(terms.end_lo.direct, -0.4642918469085272960358685);
}

TEST_CASE("integration-by-parts identity") {
    AdmissibilityCertificate cert = s1_cert();
    VectorField field = make_field({"poly:0,1"}, 5.0).reflect_extend();
    CarlemanWeight weight{Mode::degenerate, cert.x0, cert.beta, cert.d_M};
    SUBCASE("zero function gives zero residual") {
        CylinderGrids grids = cylinder_grids(SpatialDomain::interval(-1.0, 1.0), -5.0, 5.0, 1);
        TestFunction z = TestFunction::zero(1);
        CHECK(ibp_identity_residual(z, field, weight, grids, 0.5, 1) == 0.0);
    }
    SUBCASE("gaussian test function converges under refinement") {
        // strict decrease until the double-precision floor (the identity
        // converges spectrally and saturates near 1e-14 by level 3)
        TestFunction w = TestFunction::gaussian(1, 1.5, Vec::of(0.2), 0.2, 0.4);
        double prev = 1e9;
        for (int level = 1; level <= 4; ++level) {
            CylinderGrids grids =
                cylinder_grids(SpatialDomain::interval(-1.0, 1.0), -cert.t1, cert.t1, level);
            double resid = ibp_identity_residual(w, field, weight, grids, 0.5, 1);
            CHECK((resid < prev || resid <= 1e-12));
            if (level == 3) CHECK(resid <= 1e-6);
            prev = resid;
        }
    }
}

TEST_CASE("degenerate sharp slack") {
    AdmissibilityCertificate cert = s1_cert();
    VectorField base = make_field({"poly:0,1"}, 5.0);
    SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
    SUBCASE("zero function: slack and tolerance are both zero") {
        TestFunction z = TestFunction::zero(1);
        SlackBreakdown b = carleman_slack(z, base, cert, dom, 0.5, 1, SlackForm::degenerate_sharp, 1);
        CHECK(b.slack == 0.0);
        CHECK(b.pass);
    }
    SUBCASE("gaussian stays nonnegative across the s grid") {
        TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(-0.2), 0.1, 0.0);
        for (double s : {0.05, 0.1, 0.2, 0.5, 1.0}) {
            SlackBreakdown b = carleman_slack(w, base, cert, dom, s, 2, SlackForm::degenerate_sharp, 1);
            CHECK(b.pass);
            CHECK(b.slack >= -b.tol_quad - 1e-12);
        }
    }
    SUBCASE("form must match the certificate mode") {
        TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(0.0), 0.1, 0.0);
        CHECK_THROWS_AS(carleman_slack(w, base, cert, dom, 0.5, 1, SlackForm::nondegenerate_exact, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(carleman_slack(w, base, cert, dom, -0.5, 1, SlackForm::degenerate_sharp, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("shift invariance of the slack") {
    AdmissibilityCertificate cert = s1_cert();
    VectorField base = make_field({"poly:0,1"}, 5.0);
    SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
    TestFunction w = TestFunction::gaussian(1, 1.2, Vec::of(0.3), 0.15, 0.7);
    const double s = 0.2;
    double shift1 = cert.d_M;
    double shift2 = cert.d_M - 2.0;
    SlackBreakdown a = carleman_slack(w, base, cert, dom, s, 2, SlackForm::degenerate_sharp, 1, shift1);
    SlackBreakdown b = carleman_slack(w, base, cert, dom, s, 2, SlackForm::degenerate_sharp, 1, shift2);
    double expected_ratio = std::exp(2.0 * s * (shift1 - shift2));
    for (auto [ta, tb] : {std::pair{a.lhs, b.lhs},
                          std::pair{a.rhs_volume, b.rhs_volume},
                          std::pair{a.rhs_sigma, b.rhs_sigma},
                          std::pair{a.rhs_endpoint, b.rhs_endpoint}}) {
        if (ta == 0.0 && tb == 0.0) continue;
        CHECK(std::abs(tb / ta - expected_ratio) <= 1e-12 * expected_ratio);
    }
    CHECK((a.slack >= 0.0) == (b.slack >= 0.0));
}

TEST_CASE("log-domain accumulation agrees with direct summation") {
    AdmissibilityCertificate cert = s1_cert();
    VectorField field = make_field({"poly:0,1"}, 5.0).reflect_extend();
    CarlemanWeight weight{Mode::degenerate, cert.x0, cert.beta, cert.d_M};
    CylinderGrids grids = cylinder_grids(SpatialDomain::interval(-1.0, 1.0), -cert.t1, cert.t1, 2);
    TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(0.1), 0.2, -0.5);
    CarlemanTerms terms = carleman_terms(w, field, weight, grids, 0.3, true, 1);
    auto agree = [](const TermValue& tv) {
        if (tv.direct == 0.0) {
            CHECK(tv.logv.is_zero());
            return;
        }
        CHECK(std::abs(tv.logv.value() - tv.direct) <= 2e-12 * std::abs(tv.direct));
    };
    agree(terms.vol_w2);
    agree(terms.vol_Aw2);
    agree(terms.vol_A2w2);
    agree(terms.vol_Asq_w2);
    agree(terms.sigma_flux);
    agree(terms.end_hi);
    agree(terms.end_lo);
}

TEST_CASE("worker count does not change any term bit") {
    AdmissibilityCertificate cert = s1_cert();
    VectorField field = make_field({"poly:0,1"}, 5.0).reflect_extend();
    CarlemanWeight weight{Mode::degenerate, cert.x0, cert.beta, cert.d_M};
    CylinderGrids grids = cylinder_grids(SpatialDomain::interval(-1.0, 1.0), -cert.t1, cert.t1, 2);
    TestFunction w = TestFunction::gaussian(1, 0.8, Vec::of(-0.3), 0.3, 1.0);
    CarlemanTerms t1 = carleman_terms(w, field, weight, grids, 0.5, false, 1);
    CarlemanTerms t4 = carleman_terms(w, field, weight, grids, 0.5, false, 4);
    CHECK(t1.vol_w2.direct == t4.vol_w2.direct);
    CHECK(t1.vol_Aw2.direct == t4.vol_Aw2.direct);
    CHECK(t1.vol_A2w2.direct == t4.vol_A2w2.direct);
    CHECK(t1.vol_Asq_w2.direct == t4.vol_Asq_w2.direct);
    CHECK(t1.vol_ibp_lhs.direct == t4.vol_ibp_lhs.direct);
    CHECK(t1.sigma_flux.direct == t4.sigma_flux.direct);
    CHECK(t1.end_hi.direct == t4.end_hi.direct);
    CHECK(t1.end_lo.direct == t4.end_lo.direct);
}

TEST_CASE("non-degenerate slack forms and s_star") {
    AdmissibilityCertificate cert = s3_cert();
    VectorField base = make_field({"poly:1,1"}, 16.0);
    SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
    SUBCASE("exact form is nonnegative") {
        TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(0.0), 0.05, 2.0);
        for (double s : {0.05, 0.5}) {
            SlackBreakdown b = carleman_slack(w, base, cert, dom, s, 2, SlackForm::nondegenerate_exact, 1);
            CHECK(b.pass);
        }
    }
    SUBCASE("s_star matches the sampled-max closed form") {
        double got = s_star(cert, base, dom);
        // M = 2(1 + R) + 2(1 + 16)^2 attained at x = 1, t = 16
        double M = 2.0 * (1.0 + cert.R) + 2.0 * 17.0 * 17.0;
        double expect = 2.0 * M / std::pow(2.0 * cert.delta - cert.beta, 2);
        CHECK(std::abs(got - expect) <= 1e-9 * expect);
        CHECK(got == doctest::Approx(176.015).epsilon(1e-4));
    }
    SUBCASE("s_star blows up as beta approaches 2 delta") {
        AdmissibilityCertificate near = cert;
        near.beta = 2.0 * near.delta - 1e-9;
        CHECK(s_star(near, base, dom) > 1e12);
    }
    SUBCASE("final form passes at and beyond s_star in log-domain mode") {
        double sstar = s_star(cert, base, dom);
        TestFunction w = TestFunction::gaussian(1, 1.0, Vec::of(0.2), 0.05, 3.0);
        for (double s : {sstar, 1.5 * sstar}) {
            SlackBreakdown b =
                carleman_slack(w, base, cert, dom, s, 2, SlackForm::nondegenerate_final, 1);
            CHECK(b.log_domain);
            CHECK(b.pass);
        }
    }
    SUBCASE("log-domain activation threshold") {
        CHECK_FALSE(log_domain_needed(cert, 0.5));
        CHECK(log_domain_needed(cert, 176.0));
    }
}

TEST_CASE("energy identity machinery") {
    SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
    VectorField field = make_field({"poly:0,1"}, 5.0);
    SUBCASE("constant profiles have zero residual") {
        SpatialProfile c = SpatialProfile::constant(1, 2.0);
        CHECK(energy_residual(c, field, dom, 1.0, 1e-3, 3) <= 1e-12);
    }
    SUBCASE("gaussian residual is small and decays at order 2") {
        SpatialProfile g = SpatialProfile::gaussian(1, 1.0, Vec::of(0.0));
        double r = energy_residual(g, field, dom, 1.0, 1e-3, 3);
        CHECK(r <= 1e-6);
        double r1 = energy_residual(g, field, dom, 1.0, 2e-2, 3);
        double r2 = energy_residual(g, field, dom, 1.0, 1e-2, 3);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("window violations are rejected") {
        SpatialProfile g = SpatialProfile::gaussian(1, 1.0, Vec::of(0.0));
        CHECK_THROWS_AS(energy_residual(g, field, dom, 0.0, 1e-3, 3), std::out_of_range);
    }
    SUBCASE("residual does not grow under grid refinement") {
        SpatialProfile g = SpatialProfile::gaussian(1, 1.0, Vec::of(0.2));
        double rl1 = energy_residual(g, field, dom, 1.0, 1e-2, 1);
        double rl3 = energy_residual(g, field, dom, 1.0, 1e-2, 3);
        CHECK(rl3 <= rl1 + 1e-12);
    }
}

TEST_CASE("energy bound constant") {
    CHECK(energy_bound_constant(make_field({"poly:0,1"}, 5.0)) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(energy_bound_constant(make_field({"poly:1,1"}, 16.0)) ==
          doctest::Approx(17.0).epsilon(1e-10));
    SUBCASE("static field: zero constant and conserved norm") {
        VectorField h0 = make_field({"poly:0"}, 5.0);
        CHECK(energy_bound_constant(h0) == 0.0);
        SpatialDomain dom = SpatialDomain::interval(-1.0, 1.0);
        SpatialProfile g = SpatialProfile::gaussian(1, 2.0, Vec::of(0.0));
        SpaceGrid grid = volume_grid(dom, 64);
        auto energy = [&](double t) {
            double s = 0.0;
            for (std::size_t i = 0; i < grid.x.size(); ++i) {
                double u = evaluate_solution(g, h0, grid.x[i], t);
                s += grid.w[i] * u * u;
            }
            return s;
        };
        CHECK(std::abs(energy(3.0) - energy(0.0)) <= 1e-14);
    }
}

TEST_CASE("pointwise lower bound on feasible certificates") {
    AdmissibilityCertificate c1 = s1_cert();
    CHECK(pointwise_bound_margin(c1, make_field({"poly:0,1"}, 5.0), SpatialDomain::interval(-1.0, 1.0),
                                 c1.t1) >= -1e-9);
    AdmissibilityCertificate c3 = s3_cert();
    CHECK(pointwise_bound_margin(c3, make_field({"poly:1,1"}, 16.0),
                                 SpatialDomain::interval(-1.0, 1.0), c3.t1) >= -1e-9);
}
