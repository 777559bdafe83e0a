#include "transobs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace transobs {

namespace {

struct RawEntry {
    std::string value;
    long line;
    bool used{false};
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& value, long line) {
    std::vector<double> out;
    std::istringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        std::size_t used = 0;
        try {
            out.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            throw ConfigError("expected a number, got '" + tok + "'", line);
        }
        if (used != tok.size()) throw ConfigError("trailing characters in number '" + tok + "'", line);
    }
    if (out.empty()) throw ConfigError("empty number list", line);
    return out;
}

class Entries {
  public:
    void insert(const std::string& key, const std::string& value, long line) {
        if (map_.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
        map_[key] = RawEntry{value, line, false};
    }
    const RawEntry* find(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    RawEntry require(const std::string& key) {
        const RawEntry* e = find(key);
        if (!e) throw ConfigError("missing required key '" + key + "'");
        return *e;
    }
    void reject_unused() const {
        for (const auto& [key, entry] : map_)
            if (!entry.used) throw ConfigError("unknown key '" + key + "'", entry.line);
    }
    std::vector<std::pair<std::string, RawEntry>> with_prefix(const std::string& prefix) {
        std::vector<std::pair<std::string, RawEntry>> out;
        for (auto& [key, entry] : map_)
            if (key.rfind(prefix, 0) == 0) {
                entry.used = true;
                out.emplace_back(key, entry);
            }
        return out;
    }

  private:
    std::map<std::string, RawEntry> map_;
};

double parse_one_number(const RawEntry& e) {
    std::vector<double> nums = parse_numbers(e.value, e.line);
    if (nums.size() != 1) throw ConfigError("expected a single number", e.line);
    return nums[0];
}

}  // namespace

Scenario parse_scenario(std::istream& is, const std::string& origin) {
    Entries entries;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + stripped + "'", lineno);
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'", lineno);
        entries.insert(key, value, lineno);
    }

    Scenario sc;
    sc.name = entries.require("scenario.name").value;

    // domain
    RawEntry kind = entries.require("domain.kind");
    RawEntry dim_e = entries.require("domain.dim");
    RawEntry params = entries.require("domain.params");
    int dim = static_cast<int>(parse_one_number(dim_e));
    std::vector<double> pv = parse_numbers(params.value, params.line);
    try {
        if (kind.value == "interval") {
            if (dim != 1) throw ConfigError("interval requires domain.dim = 1", dim_e.line);
            if (pv.size() != 2) throw ConfigError("interval takes params lo,hi", params.line);
            sc.domain = SpatialDomain::interval(pv[0], pv[1]);
        } else if (kind.value == "box") {
            if (dim != 2) throw ConfigError("box requires domain.dim = 2", dim_e.line);
            if (pv.size() != 4) throw ConfigError("box takes params lox,loy,hix,hiy", params.line);
            sc.domain = SpatialDomain::box(Vec::of(pv[0], pv[1]), Vec::of(pv[2], pv[3]));
        } else if (kind.value == "ball") {
            if (dim != 2) throw ConfigError("ball requires domain.dim = 2", dim_e.line);
            if (pv.size() != 3) throw ConfigError("ball takes params cx,cy,r", params.line);
            sc.domain = SpatialDomain::ball(Vec::of(pv[0], pv[1]), pv[2]);
        } else {
            throw ConfigError("unknown domain.kind '" + kind.value + "'", kind.line);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), params.line);
    }

    // field
    RawEntry fdim_e = entries.require("field.dim");
    int fdim = static_cast<int>(parse_one_number(fdim_e));
    if (fdim != sc.domain.dim())
        throw ConfigError("field.dim must match domain.dim", fdim_e.line);
    double T = parse_one_number(entries.require("field.T"));
    double T1 = T;
    if (const RawEntry* t1e = entries.find("field.T1")) T1 = parse_one_number(*t1e);
    std::vector<ComponentFn> comps(fdim);
    std::vector<bool> seen(fdim, false);
    for (auto& [key, entry] : entries.with_prefix("field.component.")) {
        std::string idx = key.substr(std::string("field.component.").size());
        int i = 0;
        try {
            i = std::stoi(idx);
        } catch (const std::exception&) {
            throw ConfigError("bad component index '" + idx + "'", entry.line);
        }
        if (i < 1 || i > fdim)
            throw ConfigError("component index " + idx + " outside 1.." + std::to_string(fdim),
                              entry.line);
        try {
            comps[i - 1] = parse_component(entry.value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), entry.line);
        }
        seen[i - 1] = true;
    }
    for (int i = 0; i < fdim; ++i)
        if (!seen[i])
            throw ConfigError("missing key 'field.component." + std::to_string(i + 1) + "'");
    try {
        sc.field = VectorField(std::move(comps), T, T1);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    // certificate inputs
    RawEntry mode_e = entries.require("cert.mode");
    try {
        sc.mode = parse_mode(mode_e.value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), mode_e.line);
    }
    RawEntry c0_e = entries.require("cert.c0");
    sc.c0 = parse_one_number(c0_e);
    if (!(sc.c0 > 1.0 / std::sqrt(2.0) && sc.c0 < 1.0))
        throw ConfigError("c0 must lie in (1/sqrt(2), 1)", c0_e.line);
    RawEntry eta_e = entries.require("cert.eta");
    sc.eta = parse_one_number(eta_e);
    if (!(sc.eta > 0.0)) throw ConfigError("eta must be positive", eta_e.line);

    if (const RawEntry* e = entries.find("carleman.s")) {
        sc.s_grid = parse_numbers(e->value, e->line);
        for (double s : sc.s_grid)
            if (!(s > 0.0)) throw ConfigError("s grid values must be positive", e->line);
    }
    if (const RawEntry* e = entries.find("quad.level")) {
        sc.level = static_cast<int>(parse_one_number(*e));
        if (sc.level < 0 || sc.level > 6) throw ConfigError("quad.level must be in 0..6", e->line);
    }
    if (const RawEntry* e = entries.find("ensemble.count")) {
        sc.ensemble_count = static_cast<int>(parse_one_number(*e));
        if (sc.ensemble_count < 0) throw ConfigError("ensemble.count must be >= 0", e->line);
    }
    if (const RawEntry* e = entries.find("ensemble.seed"))
        sc.ensemble_seed = static_cast<std::uint64_t>(parse_one_number(*e));
    if (const RawEntry* e = entries.find("ensemble.profiles")) {
        if (e->value == "random-gaussian")
            sc.profiles = ProfileKind::random_gaussian;
        else if (e->value == "vanishing-bump")
            sc.profiles = ProfileKind::vanishing_bump;
        else if (e->value == "both")
            sc.profiles = ProfileKind::both;
        else
            throw ConfigError("ensemble.profiles must be random-gaussian, vanishing-bump, or both",
                              e->line);
    }
    if (const RawEntry* e = entries.find("output.dir")) sc.out_dir = e->value;

    entries.reject_unused();
    (void)origin;
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open scenario file '" + path + "'");
    return parse_scenario(f, path);
}

}  // namespace transobs
