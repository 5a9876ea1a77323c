#pragma once

#include "sweep/io.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sweep::cli {

/// Everything a subcommand reads. Loaded from JSON, then overridden by flags.
struct RunConfig {
    std::string problem = "example1";
    std::map<std::string, double> params;
    std::string output = ".";

    ScheduleConfig schedule;
    IntegratorOptions integrator;
    ProbeGrid probe;
    MPTolerances tolerances;

    std::string method = "penalty";  // penalty | catchup
    int k = 0;                       // schedule member, 0 means the last
    std::optional<double> gamma;
    std::optional<double> sigma;
    int steps = 20'000;              // catch-up steps
    std::string control = "nominal"; // nominal | constant:V | bang-bang:TS:A:B
    double lambda = 1.0;
    std::vector<double> pT;
    std::string costate = "constant";  // constant | penalty
    int members = 5;
    double ib_tolerance = 1e-3;

    examples::SwitchSearchOptions search;

    /// Throws ConfigError on a non-positive tolerance or malformed value.
    void check() const;
};

/// Reads a JSON object into cfg; unknown keys throw ConfigError.
void apply_json(RunConfig& cfg, const io::Json& j);

/// Parses "nominal", "constant:V" or "bang-bang:TS:A:B" (scalar controls).
ControlSignal parse_control(const std::string& text, const examples::BuiltinProblem& b);

/// Exit codes: 0 success, 1 failed check or numerical failure, 2 usage or
/// configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sweep::cli
