#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "transobs/pipeline.hpp"
#include "transobs/transport.hpp"

using namespace transobs;

namespace {

Scenario load(const char* name) {
    return load_scenario(std::string(TRANSOBS_SCENARIO_DIR) + "/" + name);
}

std::string render_all(const Scenario& sc, const CertifyOutcome& outcome,
                       const VerificationReport& rep) {
    std::ostringstream os;
    write_certify_csv(os, sc, outcome);
    write_carleman_csv(os, sc, rep);
    write_energy_csv(os, sc, rep);
    return os.str();
}

}  // namespace

TEST_CASE("certify outcomes per scenario") {
    CertifyOutcome s1 = run_certify(load("s1.cfg"));
    CHECK(s1.cert.feasible);
    CHECK(s1.cert.margin() == doctest::Approx(1.1162133).epsilon(1e-6));

    CertifyOutcome s2 = run_certify(load("s2.cfg"));
    CHECK_FALSE(s2.cert.feasible);
    CHECK(s2.cert.margin() == doctest::Approx(-3.5087867).epsilon(1e-5));

    CertifyOutcome s3 = run_certify(load("s3.cfg"));
    CHECK(s3.cert.feasible);
    CHECK(s3.cert.margin() == doctest::Approx(0.9162011).epsilon(1e-6));
    CHECK(s3.s_star_value == doctest::Approx(176.015).epsilon(1e-4));
}

TEST_CASE("sinusoid and two-dimensional feasible scenarios") {
    SUBCASE("S4: sinusoidal perturbation shrinks rho and delta") {
        Scenario sc = load("s4.cfg");
        CertifyOutcome out = run_certify(sc);
        REQUIRE(out.cert.feasible);
        // min H' = 1 + 0.2 cos(2t) attains 0.8 at t = pi/2
        CHECK(out.cert.rho == doctest::Approx(0.8).epsilon(1e-12));
        double delta = 0.8 * (2.0 * 0.8 * 0.8 - 1.0) * 17.9;
        CHECK(out.cert.delta == doctest::Approx(delta).epsilon(1e-12));
        CHECK(out.cert.T0 == doctest::Approx(std::sqrt(75.6 / delta)).epsilon(1e-9));
    }
    SUBCASE("S5: feasible ball scenario passes a slack check") {
        Scenario sc = load("s5.cfg");
        CertifyOutcome out = run_certify(sc);
        REQUIRE(out.cert.feasible);
        CHECK(out.cert.t1 == 5.0);  // drift stays within the cone on [0, T]
        auto w = make_test_ensemble(1, 1, sc.domain, -out.cert.t1, out.cert.t1);
        SlackBreakdown b =
            carleman_slack(w[0], sc.field, out.cert, sc.domain, 0.2, 1, SlackForm::degenerate_sharp, 2);
        CHECK(b.pass);
    }
}

TEST_CASE("box scenarios carry a hypothesis note") {
    std::istringstream is(
        "scenario.name = BX\n"
        "domain.kind = box\n"
        "domain.dim = 2\n"
        "domain.params = -1,-1,1,1\n"
        "field.dim = 2\n"
        "field.T = 5\n"
        "field.component.1 = poly:0,1\n"
        "field.component.2 = poly:0\n"
        "cert.mode = degenerate\n"
        "cert.c0 = 0.8\n"
        "cert.eta = 0.05\n");
    Scenario sc = parse_scenario(is, "inline");
    CertifyOutcome outcome = run_certify(sc);
    REQUIRE_FALSE(outcome.notes.empty());
    CHECK(outcome.notes[0].find("piecewise smooth") != std::string::npos);
    std::ostringstream os;
    write_certify_csv(os, sc, outcome);
    CHECK(os.str().find("piecewise smooth") != std::string::npos);
}

TEST_CASE("verify runs green on the reference scenarios at a coarse level") {
    Scenario sc = load("s1.cfg");
    sc.level = 1;
    sc.ensemble_count = 4;
    CertifyOutcome outcome = run_certify(sc);
    VerificationReport rep = run_verify(sc, outcome, 1, false);
    CHECK(rep.all_pass());
    CHECK_FALSE(rep.diagnostic);
    bool has_pointwise = false;
    for (const auto& row : rep.checks)
        if (row.check == "pointwise_bound") has_pointwise = row.pass;
    CHECK(has_pointwise);
}

TEST_CASE("verify requires force on infeasible certificates") {
    Scenario sc = load("s2.cfg");
    sc.level = 1;
    sc.ensemble_count = 2;
    CertifyOutcome outcome = run_certify(sc);
    CHECK_THROWS_AS(run_verify(sc, outcome, 1, false), std::invalid_argument);
    VerificationReport rep = run_verify(sc, outcome, 1, true);
    CHECK(rep.diagnostic);
    bool angle_fail = false;
    for (const auto& row : rep.checks)
        if (row.check == "angle_window" && !row.pass && row.slack < 0.0) angle_fail = true;
    CHECK(angle_fail);  // the longer window breaks the angle bound on S2
}

TEST_CASE("observability estimation") {
    SUBCASE("feasible scenario gives finite stable ratios") {
        Scenario sc = load("s1.cfg");
        sc.level = 2;
        sc.ensemble_count = 4;
        CertifyOutcome outcome = run_certify(sc);
        ObservabilityReport rep = run_observe(sc, outcome, 2);
        CHECK_FALSE(rep.any_unbounded);
        CHECK_FALSE(rep.anomaly);
        CHECK(rep.c_obs_lo > 0.0);
        CHECK(rep.stability_rel <= 0.05);
        CHECK(rep.c2 >= rep.c_local);
        CHECK(rep.c_e == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("static diagnostic reports the unbounded sentinel") {
        Scenario sc = load("h0.cfg");
        sc.level = 1;
        CertifyOutcome outcome = run_certify(sc);
        CHECK_FALSE(outcome.cert.feasible);
        ObservabilityReport rep = run_observe(sc, outcome, 1);
        CHECK(rep.diagnostic);
        CHECK(rep.any_unbounded);
        CHECK_FALSE(rep.anomaly);  // expected under a violated hypothesis
        CHECK(rep.c_e == 0.0);
        bool saw_inf = false;
        for (const auto& row : rep.rows) saw_inf |= row.unbounded;
        CHECK(saw_inf);
        std::ostringstream os;
        write_observability_csv(os, sc, rep);
        CHECK(os.str().find("inf") != std::string::npos);
        CHECK(os.str().find("unbounded") != std::string::npos);
    }
    SUBCASE("zero profile rows are skipped, not divided") {
        Scenario sc = load("s1.cfg");
        sc.level = 1;
        sc.ensemble_count = 0;
        sc.profiles = ProfileKind::random_gaussian;
        CertifyOutcome outcome = run_certify(sc);
        ObservabilityReport rep = run_observe(sc, outcome, 1);
        CHECK(rep.rows.empty());
    }
}

TEST_CASE("adding profiles never decreases the estimated constant") {
    Scenario sc = load("s1.cfg");
    sc.level = 1;
    CertifyOutcome outcome = run_certify(sc);
    double prev = 0.0;
    for (int count : {2, 4, 8}) {
        Scenario grown = sc;
        grown.ensemble_count = count;  // seeded draws nest by construction
        ObservabilityReport rep = run_observe(grown, outcome, 1);
        CHECK(rep.c_obs_lo >= prev - 1e-15);
        prev = rep.c_obs_lo;
    }
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    Scenario sc = load("s1.cfg");
    sc.level = 1;
    sc.ensemble_count = 3;
    CertifyOutcome outcome = run_certify(sc);
    std::string a = render_all(sc, outcome, run_verify(sc, outcome, 1, false));
    std::string b = render_all(sc, outcome, run_verify(sc, outcome, 1, false));
    std::string c = render_all(sc, outcome, run_verify(sc, outcome, 4, false));
    CHECK(a == b);
    CHECK(a == c);
    std::ostringstream oa, ob;
    write_observability_csv(oa, sc, run_observe(sc, outcome, 1));
    write_observability_csv(ob, sc, run_observe(sc, outcome, 4));
    CHECK(oa.str() == ob.str());
}

TEST_CASE("randomized registry fields survive the whole stack") {
    // seeded sweep: random degenerate fields, certify; feasible ones must
    // pass a slack row, the pointwise bound, and the self-audit
    SplitMix64 rng(20240601);
    int feasible_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 20; ++trial) {
        bool planar = rng.uniform() < 0.4;
        SpatialDomain dom = planar ? SpatialDomain::ball(Vec::of(0.0, 0.0), 1.0)
                                   : SpatialDomain::interval(-1.0, 1.0);
        double T = rng.uniform(2.0, 6.0);
        std::vector<ComponentFn> comps;
        for (int i = 0; i < dom.dim(); ++i) {
            std::ostringstream d;
            // H_i(0) = 0, leading slope away from zero for the first axis
            double slope = i == 0 ? rng.uniform(0.5, 1.5) : rng.uniform(-0.3, 0.3);
            double quad = rng.uniform(-0.2, 0.2);
            d << "poly:0," << slope << "," << quad;
            if (rng.uniform() < 0.5) d << " + sin:" << rng.uniform(-0.1, 0.1) << "," << rng.uniform(0.5, 3.0);
            comps.push_back(parse_component(d.str()));
        }
        VectorField field(std::move(comps), T, T);
        AdmissibilityCertificate cert =
            build_certificate(dom, field, 0.8, Mode::degenerate, 0.05);
        if (!cert.feasible) {
            ++infeasible_seen;
            CHECK_FALSE(cert.diagnostics.empty());
            continue;
        }
        ++feasible_seen;
        CHECK(pointwise_bound_margin(cert, field, dom, cert.t1) >= -1e-9);
        auto w = make_test_ensemble(1, 7 + trial, dom, -cert.t1, cert.t1);
        SlackBreakdown b = carleman_slack(w[0], field, cert, dom, 0.2, 1,
                                          SlackForm::degenerate_sharp, 2);
        CHECK(b.pass);
    }
    CHECK(feasible_seen > 0);  // the sweep must exercise the green path
}

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(format17(0.1) == "0.10000000000000001");
    CHECK(format17(std::numeric_limits<double>::infinity()) == "inf");
}

#ifdef TRANSOBS_CLI_PATH
TEST_CASE("cli exit codes and artifacts") {
    std::string cli = TRANSOBS_CLI_PATH;
    std::string dir = std::string(TRANSOBS_SCENARIO_DIR);
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(run("certify " + dir + "/s1.cfg --out /tmp/transobs_t1") == 0);
    CHECK(run("certify " + dir + "/s2.cfg --out /tmp/transobs_t2") == 2);
    CHECK(run("verify " + dir + "/s2.cfg --out /tmp/transobs_t2b --level 1") == 2);
    CHECK(run("certify /nonexistent.cfg") == 4);
    CHECK(run("observe " + dir + "/h0.cfg --force --level 1 --out /tmp/transobs_t3") == 0);
    CHECK(run("observe " + dir + "/h0.cfg --level 1 --out /tmp/transobs_t3b") == 2);
    CHECK(run("trace-export " + dir + "/s1.cfg --level 1 --out /tmp/transobs_t4") == 0);
    CHECK(run("reconstruct " + dir + "/s1.cfg --at 0,1 --out /tmp/transobs_t5") == 0);
    std::ifstream f("/tmp/transobs_t1/certify.csv");
    CHECK(f.good());
    std::ifstream t("/tmp/transobs_t4/trace.csv");
    CHECK(t.good());
}
#endif
