#pragma once

// Command-line surface. Every subcommand reads a RunConfig assembled from
// defaults, an optional JSON file (--config) and flags, in that order, and
// writes CSV to --output (stdout by default) plus optional metadata JSON.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fieldroad/cone.hpp"
#include "fieldroad/core.hpp"
#include "fieldroad/grid.hpp"
#include "fieldroad/hjsolver.hpp"
#include "fieldroad/kppsim.hpp"

namespace fieldroad {

inline const std::vector<std::string> kCommands{"eval", "contour", "sweep", "path", "freidlin",
                                                "cone", "hj",      "kpp",   "strip", "check"};

struct RunConfig {
    std::string command = "eval";
    Params params{2.0, 2.0, 2.0};
    double t = 1.0;

    // eval, path, cone
    std::vector<std::array<double, 2>> points{{4.0, 0.0}};

    // contour, sweep
    GridSpec grid{};
    double level = 1.0;
    std::string placement = "linear";  // linear | exact
    std::string fixed = "a=2,b=2";
    std::string vary = "c=1:10:1";

    // path, freidlin
    std::size_t samples = 64;
    std::vector<double> thetas{0.05, 1.0, 2.2};

    // cone
    ConeConfig cone{};
    double r_max = 10.0;
    std::size_t condition_samples = 101;
    bool override_unverified = false;

    // hj
    SolverConfig hj{};
    std::size_t collar = 5;

    // kpp
    EpsRunConfig kpp{};
    std::vector<double> eps_values{0.4, 0.2, 0.1};

    // strip
    StripConfig strip{};
    std::vector<double> deltas{0.2, 0.1, 0.05};

    // check
    bool quick = false;
    std::vector<int> only{};

    // io
    std::string output = "-";
    std::string meta;
    std::string field_dump;
    std::size_t threads = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Pretty-printed JSON holding every field.
std::string config_to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys and wrong types throw
/// ConfigError.
RunConfig config_from_json(const std::string& text);

/// `name=start:stop:step`, both ends included. Throws ConfigError.
struct SweepRange {
    std::string name;
    std::vector<double> values;
};
SweepRange parse_sweep_range(const std::string& spec);

/// Runs one command line (program name excluded). Returns 0 on success,
/// 1 on a usage or validation error and 2 when `check` finds a failing
/// property. Errors go to `err` as one JSON line.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fieldroad
