#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smoothrl {

/// Scalar input u(t). Defined for all real t.
class InputSignal {
public:
    enum class Kind { constant, step, ramp, piecewise_linear, external_trace };

    static InputSignal constant(double value);
    /// before for t < t0, after for t >= t0.
    static InputSignal step(double t0, double before, double after);
    /// value0 until t0, then value0 + slope (t - t0).
    static InputSignal ramp(double t0, double value0, double slope);
    /// Linear interpolation through (times, values), held constant outside.
    /// Repeated knot times encode jumps (the later value applies from that time).
    static InputSignal piecewise_linear(std::vector<double> times, std::vector<double> values);
    /// Sampled trace, linearly interpolated; same semantics as piecewise_linear.
    static InputSignal external_trace(std::vector<double> times, std::vector<double> values);

    Kind kind() const noexcept { return kind_; }

    double operator()(double t) const noexcept { return at(t); }
    double at(double t) const noexcept;
    /// Left limit u(t-). Differs from at(t) only at a jump.
    double before(double t) const noexcept;

private:
    InputSignal(Kind kind, std::vector<double> times, std::vector<double> values, double a = 0, double b = 0,
                double c = 0);

    Kind kind_;
    std::vector<double> times_;
    std::vector<double> values_;
    double a_, b_, c_;
};

std::string_view to_string(InputSignal::Kind kind) noexcept;

} // namespace smoothrl
