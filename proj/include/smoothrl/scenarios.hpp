#pragma once

// Built-in case studies. A scenario is identified by name and configured by
// a variant, a flat map of named parameters (defaults filled in from the
// built-in table) and solver settings. Everything is deterministic.

#include "smoothrl/integrate.hpp"
#include "smoothrl/linear_analysis.hpp"
#include "smoothrl/system.hpp"
#include "smoothrl/trace.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smoothrl {

enum class Variant { none, conventional, smooth };
std::string_view to_string(Variant v) noexcept;
/// Throws InvalidParameters for an unknown name.
Variant parse_variant(std::string_view name);

enum class Method { rk4, adaptive };
std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

struct SolverSettings {
    Method method = Method::adaptive;
    double horizon = 5.0;         // s
    double h = 1e-3;              // rk4 step, s
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_ctrl = 0.0;          // control grid of the conventional limiter, s
    double sample_interval = 0.0; // > 0: adaptive rows on a uniform grid

    /// Throws InvalidParameters.
    void validate() const;
    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

using ParameterMap = std::map<std::string, double>;

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::vector<Variant> variants;
    Variant default_variant;
    ParameterMap parameters;
    SolverSettings solver;
};

const std::vector<ScenarioInfo>& builtin_scenarios();
/// Throws InvalidParameters naming the unknown scenario.
const ScenarioInfo& find_scenario(std::string_view name);

struct ScenarioConfig {
    std::string scenario;
    Variant variant = Variant::smooth;
    ParameterMap parameters;
    SolverSettings solver;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Built-in defaults for a scenario and variant.
ScenarioConfig default_scenario_config(std::string_view name);
ScenarioConfig default_scenario_config(std::string_view name, Variant variant);

/// A ready-to-run system with its initial condition and signal bookkeeping.
struct BuiltScenario {
    DynamicalSystem system;
    Vector x0;
    SimulationSetup setup;
    TimeSpan span;
    /// Columns written to trace.csv.
    std::vector<std::string> trace_columns;
    /// Primary limiter output and its derivative (empty for "none").
    std::string output_column;
    std::string rate_column;
    double rate_bound = 0.0;
    /// Inputs before the disturbance; the linearization point.
    Vector pre_inputs;
};

/// Validates the configuration (variant, parameter names and values, solver)
/// and builds the system. Throws InvalidParameters.
BuiltScenario build_scenario(const ScenarioConfig& config);

SimulationTrace simulate(const BuiltScenario& built, const SolverSettings& solver);
SimulationTrace run_scenario(const ScenarioConfig& config);

/// Small-signal report at the pre-disturbance equilibrium.
/// The conventional variant throws UnsupportedRequest.
LinearizationResult linearize_scenario(const ScenarioConfig& config);

// Direct entry points for the individual case studies.

SimulationTrace scenario_step_response(Variant variant);
SimulationTrace scenario_pi_rl_loop(double kp, double ki);
SimulationTrace scenario_smooth_regulator();
SimulationTrace scenario_stiff_gfl(Variant variant = Variant::smooth);
SimulationTrace scenario_multimachine(Variant variant, int n_machines = 3);

/// Default PI grid of the rate-limited PI comparison.
struct PiGain {
    double kp;
    double ki;
};
std::vector<PiGain> default_pi_grid();

// Trace metrics.

/// Time from which v stays within band * |target - v(0)| of target; the
/// first sample time if always inside, infinity if the last sample is outside.
double settling_time(const std::vector<double>& t, const std::vector<double>& v, double target, double band = 0.02);
/// (max(v) - target) / |target|, floored at 0.
double overshoot_ratio(const std::vector<double>& v, double target);
double peak_abs(const std::vector<double>& v);
/// First time |v| >= level; infinity if never.
double first_crossing(const std::vector<double>& t, const std::vector<double>& v, double level);

} // namespace smoothrl
