#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace smoothrl {

/// Time-indexed record of a simulation. Rows share one time axis; inputs,
/// continuous states, discrete states and outputs are stored row-major.
struct SimulationTrace {
    std::vector<std::string> input_names;
    std::vector<std::string> state_names;
    std::vector<std::string> discrete_names;
    std::vector<std::string> output_names;

    std::vector<double> times;
    std::vector<double> input_data;
    std::vector<double> state_data;
    std::vector<double> discrete_data;
    std::vector<double> output_data;

    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;

    std::size_t rows() const noexcept { return times.size(); }

    std::span<const double> state(std::size_t row) const noexcept;
    std::span<const double> outputs(std::size_t row) const noexcept;
    std::span<const double> inputs(std::size_t row) const noexcept;
    std::span<const double> discrete(std::size_t row) const noexcept;

    void append(double t, std::span<const double> u, std::span<const double> x, std::span<const double> z,
                std::span<const double> y);

    /// Looks a column up by name: "t", then outputs, states, discrete states, inputs.
    bool has_column(const std::string& name) const noexcept;
    std::vector<double> column(const std::string& name) const;

    /// Linear interpolation of a column at time t (clamped to the trace range).
    double interpolate(const std::string& name, double t) const;

    /// Default CSV columns: inputs, outputs, then states and discrete states
    /// whose names do not collide with an earlier column.
    std::vector<std::string> default_columns() const;
};

/// CSV with a header row of column names and one row per record; values
/// use 17 significant digits so repeated runs diff byte-for-byte.
void write_csv(std::ostream& os, const SimulationTrace& trace, const std::vector<std::string>& columns = {});
std::string to_csv(const SimulationTrace& trace, const std::vector<std::string>& columns = {});

/// Formats with "%.17g".
std::string format_double(double v);

} // namespace smoothrl
