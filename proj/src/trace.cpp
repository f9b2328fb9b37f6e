#include "smoothrl/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace smoothrl {

namespace {

std::span<const double> row_of(const std::vector<double>& data, std::size_t width, std::size_t row) {
    return std::span<const double>(data).subspan(row * width, width);
}

// Returns (category, index); category 0 = time, 1 outputs, 2 states, 3 discrete, 4 inputs.
std::pair<int, std::size_t> locate(const SimulationTrace& tr, const std::string& name) {
    if (name == "t") return {0, 0};
    const std::vector<std::string>* lists[] = {&tr.output_names, &tr.state_names, &tr.discrete_names,
                                               &tr.input_names};
    for (int c = 0; c < 4; ++c) {
        const auto& l = *lists[c];
        const auto it = std::find(l.begin(), l.end(), name);
        if (it != l.end()) return {c + 1, static_cast<std::size_t>(it - l.begin())};
    }
    return {-1, 0};
}

} // namespace

std::span<const double> SimulationTrace::state(std::size_t row) const noexcept {
    return row_of(state_data, state_names.size(), row);
}
std::span<const double> SimulationTrace::outputs(std::size_t row) const noexcept {
    return row_of(output_data, output_names.size(), row);
}
std::span<const double> SimulationTrace::inputs(std::size_t row) const noexcept {
    return row_of(input_data, input_names.size(), row);
}
std::span<const double> SimulationTrace::discrete(std::size_t row) const noexcept {
    return row_of(discrete_data, discrete_names.size(), row);
}

void SimulationTrace::append(double t, std::span<const double> u, std::span<const double> x,
                             std::span<const double> z, std::span<const double> y) {
    times.push_back(t);
    input_data.insert(input_data.end(), u.begin(), u.end());
    state_data.insert(state_data.end(), x.begin(), x.end());
    discrete_data.insert(discrete_data.end(), z.begin(), z.end());
    output_data.insert(output_data.end(), y.begin(), y.end());
}

bool SimulationTrace::has_column(const std::string& name) const noexcept { return locate(*this, name).first >= 0; }

std::vector<double> SimulationTrace::column(const std::string& name) const {
    const auto [cat, idx] = locate(*this, name);
    if (cat < 0) throw std::out_of_range("trace has no column '" + name + "'");
    if (cat == 0) return times;
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
        switch (cat) {
        case 1: out[r] = outputs(r)[idx]; break;
        case 2: out[r] = state(r)[idx]; break;
        case 3: out[r] = discrete(r)[idx]; break;
        default: out[r] = inputs(r)[idx]; break;
        }
    }
    return out;
}

double SimulationTrace::interpolate(const std::string& name, double t) const {
    if (times.empty()) throw std::out_of_range("interpolate on empty trace");
    const auto col = column(name);
    if (t <= times.front()) return col.front();
    if (t >= times.back()) return col.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return col[k - 1] + w * (col[k] - col[k - 1]);
}

std::vector<std::string> SimulationTrace::default_columns() const {
    std::vector<std::string> cols;
    std::set<std::string> seen{"t"};
    for (const auto* list : {&input_names, &output_names, &state_names, &discrete_names}) {
        for (const auto& n : *list) {
            if (seen.insert(n).second) cols.push_back(n);
        }
    }
    return cols;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const SimulationTrace& trace, const std::vector<std::string>& columns) {
    const auto cols = columns.empty() ? trace.default_columns() : columns;
    std::vector<std::vector<double>> data;
    data.reserve(cols.size());
    for (const auto& c : cols) data.push_back(trace.column(c));
    os << 't';
    for (const auto& c : cols) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        os << format_double(trace.times[r]);
        for (const auto& d : data) os << ',' << format_double(d[r]);
        os << '\n';
    }
}

std::string to_csv(const SimulationTrace& trace, const std::vector<std::string>& columns) {
    std::ostringstream os;
    write_csv(os, trace, columns);
    return os.str();
}

} // namespace smoothrl
