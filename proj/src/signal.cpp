#include "smoothrl/signal.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace smoothrl {

namespace {

double interpolate(const std::vector<double>& ts, const std::vector<double>& vs, std::size_t k, double t) {
    if (k == 0) return vs.front();
    if (k == ts.size()) return vs.back();
    const double t0 = ts[k - 1], t1 = ts[k];
    if (t >= t1) return vs[k];
    const double w = (t - t0) / (t1 - t0);
    return vs[k - 1] + w * (vs[k] - vs[k - 1]);
}

void validate_knots(const std::vector<double>& ts, const std::vector<double>& vs) {
    if (ts.empty() || ts.size() != vs.size()) {
        throw InvalidParameters("piecewise-linear input: need matching, non-empty time and value arrays");
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i]) || !std::isfinite(vs[i])) {
            throw InvalidParameters("piecewise-linear input: knots must be finite");
        }
        if (i > 0 && ts[i] < ts[i - 1]) {
            throw InvalidParameters("piecewise-linear input: knot times must be non-decreasing");
        }
    }
}

} // namespace

InputSignal::InputSignal(Kind kind, std::vector<double> times, std::vector<double> values, double a, double b,
                         double c)
    : kind_(kind), times_(std::move(times)), values_(std::move(values)), a_(a), b_(b), c_(c) {}

InputSignal InputSignal::constant(double value) { return {Kind::constant, {}, {}, value}; }

InputSignal InputSignal::step(double t0, double before, double after) { return {Kind::step, {}, {}, t0, before, after}; }

InputSignal InputSignal::ramp(double t0, double value0, double slope) { return {Kind::ramp, {}, {}, t0, value0, slope}; }

InputSignal InputSignal::piecewise_linear(std::vector<double> times, std::vector<double> values) {
    validate_knots(times, values);
    return {Kind::piecewise_linear, std::move(times), std::move(values)};
}

InputSignal InputSignal::external_trace(std::vector<double> times, std::vector<double> values) {
    validate_knots(times, values);
    return {Kind::external_trace, std::move(times), std::move(values)};
}

double InputSignal::at(double t) const noexcept {
    switch (kind_) {
    case Kind::constant: return a_;
    case Kind::step: return t < a_ ? b_ : c_;
    case Kind::ramp: return t < a_ ? b_ : b_ + c_ * (t - a_);
    case Kind::piecewise_linear:
    case Kind::external_trace: {
        const auto k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
        return interpolate(times_, values_, k, t);
    }
    }
    return 0.0;
}

double InputSignal::before(double t) const noexcept {
    switch (kind_) {
    case Kind::step: return t <= a_ ? b_ : c_;
    case Kind::piecewise_linear:
    case Kind::external_trace: {
        const auto k = static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), t) - times_.begin());
        return interpolate(times_, values_, k, t);
    }
    default: return at(t);
    }
}

std::string_view to_string(InputSignal::Kind kind) noexcept {
    switch (kind) {
    case InputSignal::Kind::constant: return "constant";
    case InputSignal::Kind::step: return "step";
    case InputSignal::Kind::ramp: return "ramp";
    case InputSignal::Kind::piecewise_linear: return "piecewise-linear";
    case InputSignal::Kind::external_trace: return "external-trace";
    }
    return "unknown";
}

} // namespace smoothrl
