#include <sstream>

#include "doctest.h"
#include "transobs/scenario.hpp"

using namespace transobs;

namespace {

const char* kBase =
    "scenario.name = T\n"
    "domain.kind = interval\n"
    "domain.dim = 1\n"
    "domain.params = -1,1\n"
    "field.dim = 1\n"
    "field.T = 5\n"
    "field.component.1 = poly:0,1\n"
    "cert.mode = degenerate\n"
    "cert.c0 = 0.8\n"
    "cert.eta = 0.05\n";

Scenario parse(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is, "inline");
}

}  // namespace

TEST_CASE("scenario files load and round-trip") {
    Scenario sc = load_scenario(std::string(TRANSOBS_SCENARIO_DIR) + "/s1.cfg");
    CHECK(sc.name == "S1");
    CHECK(sc.domain.kind() == DomainKind::interval);
    CHECK(sc.field.horizon() == 5.0);
    CHECK(sc.mode == Mode::degenerate);
    CHECK(sc.c0 == 0.8);
    CHECK(sc.eta == 0.05);
    CHECK(sc.level == 3);
    CHECK(sc.ensemble_count == 20);
    CHECK(sc.s_grid.size() == 5);  // default grid

    Scenario s3 = load_scenario(std::string(TRANSOBS_SCENARIO_DIR) + "/s3.cfg");
    CHECK(s3.mode == Mode::nondegenerate);
    CHECK(s3.field.value(3.0)[0] == 4.0);

    Scenario h0 = load_scenario(std::string(TRANSOBS_SCENARIO_DIR) + "/h0.cfg");
    CHECK(h0.profiles == ProfileKind::vanishing_bump);
}

TEST_CASE("hypothesis validation") {
    std::string bad = kBase;
    bad.replace(bad.find("cert.c0 = 0.8"), 13, "cert.c0 = 0.5");
    CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("c0 must lie in"), ConfigError);

    std::string bad_eta = kBase;
    bad_eta.replace(bad_eta.find("cert.eta = 0.05"), 15, "cert.eta = 0.0\n");
    CHECK_THROWS_WITH_AS(parse(bad_eta), doctest::Contains("eta"), ConfigError);
}

TEST_CASE("unknown and duplicate keys are rejected by name") {
    CHECK_THROWS_WITH_AS(parse(std::string(kBase) + "frobnicate = 3\n"),
                         doctest::Contains("unknown key 'frobnicate'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(std::string(kBase) + "cert.c0 = 0.9\n"),
                         doctest::Contains("duplicate key"), ConfigError);
}

TEST_CASE("missing keys are reported") {
    std::string text(kBase);
    text.erase(text.find("cert.mode = degenerate\n"), 23);
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("cert.mode"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("scenario.name = X\n"), doctest::Contains("missing required key"),
                         ConfigError);
}

TEST_CASE("descriptor errors carry position information") {
    std::string text(kBase);
    text.replace(text.find("field.component.1 = poly:0,1"), 28, "field.component.1 = poly:0,zz");
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("position"), ConfigError);
}

TEST_CASE("structural errors") {
    CHECK_THROWS_WITH_AS(parse(std::string(kBase) + "quad.level = 9\n"), doctest::Contains("level"),
                         ConfigError);
    std::string nofield = kBase;
    nofield.replace(nofield.find("field.dim = 1"), 13, "field.dim = 2");
    CHECK_THROWS_WITH_AS(parse(nofield), doctest::Contains("field.dim"), ConfigError);
    std::string badline = std::string(kBase) + "not-a-kv-line\n";
    CHECK_THROWS_WITH_AS(parse(badline), doctest::Contains("key = value"), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("s grid and ensemble overrides") {
    Scenario sc = parse(std::string(kBase) +
                        "carleman.s = 0.1,0.7\n"
                        "ensemble.count = 4\n"
                        "ensemble.seed = 99\n"
                        "ensemble.profiles = both\n"
                        "output.dir = /tmp/xyz\n");
    REQUIRE(sc.s_grid.size() == 2);
    CHECK(sc.s_grid[1] == 0.7);
    CHECK(sc.ensemble_count == 4);
    CHECK(sc.ensemble_seed == 99);
    CHECK(sc.profiles == ProfileKind::both);
    CHECK(sc.out_dir == "/tmp/xyz");
    CHECK_THROWS_WITH_AS(parse(std::string(kBase) + "carleman.s = 0.1,-0.5\n"),
                         doctest::Contains("positive"), ConfigError);
}

TEST_CASE("ball and box configs") {
    std::string ball =
        "scenario.name = B\n"
        "domain.kind = ball\n"
        "domain.dim = 2\n"
        "domain.params = 0,0,1\n"
        "field.dim = 2\n"
        "field.T = 5\n"
        "field.component.1 = poly:0,1\n"
        "field.component.2 = poly:0,0,1\n"
        "cert.mode = degenerate\n"
        "cert.c0 = 0.8\n"
        "cert.eta = 0.05\n";
    Scenario sc = parse(ball);
    CHECK(sc.domain.kind() == DomainKind::ball);
    CHECK(sc.field.dim() == 2);

    std::string box = ball;
    box.replace(box.find("domain.kind = ball"), 18, "domain.kind = box\n#");
    box.replace(box.find("domain.params = 0,0,1"), 21, "domain.params = -1,-1,1,1");
    Scenario bc = parse(box);
    CHECK(bc.domain.kind() == DomainKind::box);

    std::string bad = ball;
    bad.replace(bad.find("domain.params = 0,0,1"), 21, "domain.params = 0,0");
    CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("ball takes params"), ConfigError);
}
