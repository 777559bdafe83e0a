#ifndef TRANSOBS_SCENARIO_HPP
#define TRANSOBS_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "transobs/field.hpp"
#include "transobs/geometry.hpp"

namespace transobs {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, long line = 0)
        : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : msg),
          line_no(line) {}
    long line_no;
};

enum class ProfileKind { random_gaussian, vanishing_bump, both };

/// A validated scenario: domain, field, certificate inputs, quadrature
/// level, s grid, ensemble settings, output directory.
struct Scenario {
    std::string name;
    SpatialDomain domain{SpatialDomain::interval(-1.0, 1.0)};
    VectorField field{std::vector<ComponentFn>{parse_component("poly:0,1")}, 1.0, 1.0};
    Mode mode{Mode::degenerate};
    double c0{0.8};
    double eta{0.05};
    std::vector<double> s_grid{0.05, 0.1, 0.2, 0.5, 1.0};
    int level{3};
    int ensemble_count{10};
    std::uint64_t ensemble_seed{12345};
    ProfileKind profiles{ProfileKind::random_gaussian};
    std::string out_dir{"out"};
};

/// Parses `key = value` lines ('#' comments allowed). Unknown or
/// duplicate keys, malformed numbers, and hypothesis violations (e.g.
/// c0 outside (1/sqrt(2), 1)) raise ConfigError with the line number.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& is, const std::string& origin);

}  // namespace transobs

#endif
