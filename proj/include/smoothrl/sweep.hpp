#pragma once

#include "smoothrl/scenarios.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace smoothrl {

/// Axes of a smooth-limiter gain grid. An empty axis keeps the base value.
struct SweepGrid {
    std::vector<double> k1;
    std::vector<double> k2;
    std::vector<double> k3;

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

struct SweepRow {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    std::string status; // "valid", "invalid" (rejected gains) or "failed" (numerical error)
    double settling_time = 0.0;    // 2% band of the limiter output around its final value
    double overshoot = 0.0;        // excursion of x against the step direction, / bound
    double peak_ydot = 0.0;        // max |x|
    double dominant_pole_re = 0.0; // max Re(lambda) at the pre-disturbance equilibrium
    double rise_time_ydot = 0.0;   // first time |x| reaches 90% of the bound
    std::string message;
};

/// Runs the smooth variant of `base` at every grid point, k1 outermost and k3
/// innermost. Rows come back in that order regardless of `jobs`.
/// Throws InvalidParameters if the scenario has no smooth limiter.
std::vector<SweepRow> sweep_gains(const ScenarioConfig& base, const SweepGrid& grid, unsigned jobs = 1);

/// Header: k1,k2,k3,status,settling_time,overshoot,peak_ydot,dominant_pole_re,rise_time_ydot
void write_metrics_csv(std::ostream& os, const std::vector<SweepRow>& rows);

} // namespace smoothrl
