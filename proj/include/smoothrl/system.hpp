#pragma once

// State-space systems and block composition.
//
// A system has continuous states x (integrated), optional discrete states z
// (held between control-grid updates), named scalar inputs u and named
// scalar outputs. Blocks are composed into one flat system by wiring block
// inputs to external inputs or to other blocks' outputs.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace smoothrl {

using Vector = std::vector<double>;

struct DynamicalSystem {
    using RhsFn = std::function<void(double t, std::span<const double> x, std::span<const double> z,
                                     std::span<const double> u, std::span<double> dx)>;
    using OutputFn = std::function<void(double t, std::span<const double> x, std::span<const double> z,
                                        std::span<const double> u, std::span<double> y)>;
    using UpdateFn = std::function<void(double t, std::span<const double> x, std::span<const double> z,
                                        std::span<const double> u, double h, std::span<double> z_next)>;

    std::string name;
    std::vector<std::string> state_names;
    std::vector<std::string> discrete_names;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    /// Outputs read the current inputs (algebraic path). Cycles through
    /// feedthrough blocks are algebraic loops and are rejected by compose().
    bool feedthrough = false;

    RhsFn rhs;       // required when dimension() > 0
    OutputFn output; // required when outputs are declared
    UpdateFn update; // required when discrete states are declared

    std::size_t dimension() const noexcept { return state_names.size(); }
    std::size_t discrete_dimension() const noexcept { return discrete_names.size(); }
    std::size_t input_count() const noexcept { return input_names.size(); }
    std::size_t output_count() const noexcept { return output_names.size(); }
    bool is_hybrid() const noexcept { return !discrete_names.empty(); }

    /// Throws InvalidParameters when required callbacks are missing.
    void validate() const;

    Vector derivative(double t, std::span<const double> x, std::span<const double> z, std::span<const double> u) const;
    Vector outputs(double t, std::span<const double> x, std::span<const double> z, std::span<const double> u) const;

    /// Index of a named output, state or input; throws std::out_of_range.
    std::size_t output_index(const std::string& name) const;
    std::size_t state_index(const std::string& name) const;
    std::size_t input_index(const std::string& name) const;
};

/// `to` is "block.input"; `from` is "block.output" or an external input name.
struct Connection {
    std::string to;
    std::string from;
};

struct Wiring {
    std::vector<std::string> external_inputs;
    std::vector<Connection> connections;
};

/// Flattens blocks into one system. States, discrete states and outputs are
/// concatenated in declared block order, with names qualified as
/// "block.name". Inputs of the result are wiring.external_inputs.
/// Throws CompositionError for unresolved signals or algebraic loops.
DynamicalSystem compose(std::string name, std::vector<DynamicalSystem> blocks, const Wiring& wiring);

} // namespace smoothrl
