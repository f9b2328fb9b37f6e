#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace smoothrl {

/// Rejected parameter set (rate bounds, gains, solver settings).
class InvalidParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Adaptive step fell below h_min; carries the state where it happened.
class StiffnessError : public IntegrationError {
public:
    StiffnessError(const std::string& what, double time, std::vector<double> state)
        : IntegrationError(what, time), state_(std::move(state)) {}
    const std::vector<double>& state() const noexcept { return state_; }

private:
    std::vector<double> state_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual)
        : NumericalError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CompositionError : public std::runtime_error {
public:
    CompositionError(const std::string& what, std::string signal)
        : std::runtime_error(what), signal_(std::move(signal)) {}
    const std::string& signal() const noexcept { return signal_; }

private:
    std::string signal_;
};

/// A valid request the library deliberately does not serve
/// (e.g. linearizing the discontinuous limiter).
class UnsupportedRequest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

} // namespace smoothrl
