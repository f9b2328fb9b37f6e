#pragma once

// Time integration of DynamicalSystem.
//
// Hybrid systems (discrete states present) are stepped on a control grid
// t0 + k * h_ctrl: continuous states are integrated across each control
// interval with discrete states held, then the discrete update runs at the
// grid point. The first update happens at t0 + h_ctrl.

#include "smoothrl/signal.hpp"
#include "smoothrl/system.hpp"
#include "smoothrl/trace.hpp"

#include <limits>
#include <vector>

namespace smoothrl {

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;
};

/// Inputs (one per system input, in order) and the initial discrete state.
struct SimulationSetup {
    std::vector<InputSignal> inputs;
    Vector z0;
    /// Control-grid period for hybrid systems; 0 means "use the integration step"
    /// (fixed-step) and is an error for adaptive runs of hybrid systems.
    double h_ctrl = 0.0;
};

/// Classical fourth-order Runge-Kutta at uniform steps h. The last step is
/// shortened to land exactly on span.end. One trace row per step.
/// Throws InvalidParameters (bad h/span/sizes), IntegrationError (non-finite derivative).
SimulationTrace integrate_fixed(const DynamicalSystem& sys, const Vector& x0, TimeSpan span, double h,
                                const SimulationSetup& setup = {});

struct AdaptiveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// <= 0 selects an automatic initial step.
    double h_init = 0.0;
    double h_min = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    /// > 0 records rows on the grid start + k * sample_interval (dense output)
    /// instead of at accepted steps.
    double sample_interval = 0.0;
    std::size_t max_steps = 20'000'000;
};

/// Dormand-Prince 5(4) with FSAL and componentwise error control
/// |err_i| <= atol + rtol * max(|x_i|, |x_new_i|).
/// Throws StiffnessError when the step falls below h_min.
SimulationTrace integrate_adaptive(const DynamicalSystem& sys, const Vector& x0, TimeSpan span,
                                   const AdaptiveOptions& options = {}, const SimulationSetup& setup = {});

/// Input values at t (right-continuous).
Vector evaluate_inputs(const std::vector<InputSignal>& inputs, double t);

} // namespace smoothrl
