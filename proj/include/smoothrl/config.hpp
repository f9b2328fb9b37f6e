#pragma once

// Run configuration: a strict JSON document naming a built-in scenario and
// overriding its variant, parameters, solver settings, outputs and sweep
// grid. Unknown keys and wrongly typed values are rejected with the key path
// and the line where it appears.
//
//   {
//     "scenario": "step-response",
//     "variant": "smooth",
//     "parameters": {"k1": 1800, "k2": 120},
//     "solver": {"method": "adaptive", "rtol": 1e-8},
//     "output_dir": "out",
//     "analyses": {"trace": true, "linearize": true, "sweep": false},
//     "sweep": {"k1": [900, 1800, 3600]},
//     "jobs": 2
//   }

#include "smoothrl/scenarios.hpp"
#include "smoothrl/sweep.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace smoothrl {

struct AnalysisToggles {
    bool trace = true;
    bool linearize = false;
    bool sweep = false;

    friend bool operator==(const AnalysisToggles&, const AnalysisToggles&) = default;
};

struct RunConfig {
    ScenarioConfig scenario;
    std::string output_dir = "out";
    AnalysisToggles analyses;
    SweepGrid sweep;
    unsigned jobs = 1;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Built-in defaults with every parameter spelled out.
RunConfig default_run_config(std::string_view scenario);

/// Throws ConfigError (key path and 1-based line) on syntax errors, unknown
/// keys, wrong types and invalid values.
RunConfig parse_run_config(std::string_view text);
/// An unreadable file throws std::runtime_error.
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical form: every key present, keys sorted, two-space indent,
/// trailing newline. parse(serialize(c)) == c and serialization is idempotent.
std::string serialize_run_config(const RunConfig& config);

/// Everything that can be checked without running: scenario and variant,
/// parameter names, solver settings, jobs. Throws InvalidParameters.
void validate_run_config(const RunConfig& config);

} // namespace smoothrl
