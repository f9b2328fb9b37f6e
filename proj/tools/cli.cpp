#include "cli.hpp"

#include "smoothrl/config.hpp"
#include "smoothrl/errors.hpp"
#include "smoothrl/io.hpp"
#include "smoothrl/linear_analysis.hpp"
#include "smoothrl/scenarios.hpp"
#include "smoothrl/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace smoothrl::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string scenario;
    std::string config;
    std::string variant;
    std::string out;
    std::string method;
    std::optional<double> h;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<double> horizon;
    std::optional<double> h_ctrl;
    std::optional<double> sample;
    std::optional<unsigned> jobs;
    std::vector<std::string> sets;
    std::vector<double> k1, k2, k3;
    std::string file;
};

void add_scenario_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenario", o.scenario, "Built-in scenario name (see list-scenarios)");
    cmd->add_option("--config", o.config, "JSON run configuration file");
    cmd->add_option("--variant", o.variant, "Limiter variant: none, conventional or smooth");
    cmd->add_option("--set", o.sets, "Scenario parameter override key=value (repeatable)");
}

void add_run_options(CLI::App* cmd, Options& o) {
    add_scenario_options(cmd, o);
    cmd->add_option("--out", o.out, "Output directory (files go to <out>/<scenario>/)");
    cmd->add_option("--method", o.method, "Integrator: rk4 or adaptive");
    cmd->add_option("--h", o.h, "RK4 step size [s]");
    cmd->add_option("--rtol", o.rtol, "Adaptive relative tolerance");
    cmd->add_option("--atol", o.atol, "Adaptive absolute tolerance");
    cmd->add_option("--horizon", o.horizon, "Simulated time [s]");
    cmd->add_option("--h-ctrl", o.h_ctrl, "Control period of the conventional limiter [s]");
    cmd->add_option("--sample", o.sample, "Record adaptive output on this uniform grid [s]");
    cmd->add_option("--jobs", o.jobs, "Parallel workers for sweeps");
}

RunConfig resolve_config(const Options& o) {
    RunConfig c;
    if (!o.config.empty()) {
        c = load_run_config(o.config);
        if (!o.scenario.empty() && o.scenario != c.scenario.scenario) {
            throw InvalidParameters("--scenario '" + o.scenario + "' conflicts with the config file's scenario '" +
                                    c.scenario.scenario + "'");
        }
    } else if (!o.scenario.empty()) {
        c = default_run_config(o.scenario);
    } else {
        throw InvalidParameters("one of --scenario or --config is required");
    }

    auto& s = c.scenario;
    if (!o.variant.empty()) s.variant = parse_variant(o.variant);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidParameters("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string text = kv.substr(eq + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) throw InvalidParameters("--set " + key + ": '" + text + "' is not a number");
        s.parameters[key] = value;
    }
    if (!o.method.empty()) s.solver.method = parse_method(o.method);
    if (o.h) s.solver.h = *o.h;
    if (o.rtol) s.solver.rtol = *o.rtol;
    if (o.atol) s.solver.atol = *o.atol;
    if (o.horizon) s.solver.horizon = *o.horizon;
    if (o.h_ctrl) s.solver.h_ctrl = *o.h_ctrl;
    if (o.sample) s.solver.sample_interval = *o.sample;
    if (!o.out.empty()) c.output_dir = o.out;
    if (o.jobs) c.jobs = *o.jobs;
    if (!o.k1.empty()) c.sweep.k1 = o.k1;
    if (!o.k2.empty()) c.sweep.k2 = o.k2;
    if (!o.k3.empty()) c.sweep.k3 = o.k3;
    validate_run_config(c);
    return c;
}

fs::path scenario_dir(const RunConfig& c) { return fs::path(c.output_dir) / c.scenario.scenario; }

template <class Writer>
fs::path write_output(const RunConfig& c, const char* file, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    const fs::path path = scenario_dir(c) / file;
    write_file_atomic(path, os.str());
    return path;
}

void do_linearize(const RunConfig& c, std::ostream& out) {
    const LinearizationResult r = linearize_scenario(c.scenario);
    const auto poles = write_output(c, "poles.csv", [&](std::ostream& os) { write_poles_csv(os, r); });
    write_output(c, "state_matrix.csv", [&](std::ostream& os) { write_state_matrix_csv(os, r); });
    out << c.scenario.scenario << " [" << to_string(c.scenario.variant) << "]: " << r.eigenvalues.size()
        << " eigenvalues, " << (r.stable ? "stable" : "UNSTABLE");
    if (!r.eigenvalues.empty()) out << ", dominant re=" << format_double(r.eigenvalues.front().real());
    out << " -> " << poles.string() << '\n';
}

void do_sweep(const RunConfig& c, std::ostream& out) {
    const auto rows = sweep_gains(c.scenario, c.sweep, c.jobs);
    const auto path = write_output(c, "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, rows); });
    std::size_t valid = 0;
    for (const auto& r : rows) valid += r.status == "valid";
    out << c.scenario.scenario << ": " << rows.size() << " grid points, " << valid << " valid -> " << path.string()
        << '\n';
}

void do_simulate(const RunConfig& c, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const BuiltScenario built = build_scenario(c.scenario);
    const SimulationTrace trace = simulate(built, c.scenario.solver);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path =
        write_output(c, "trace.csv", [&](std::ostream& os) { write_csv(os, trace, built.trace_columns); });

    out << c.scenario.scenario << " [" << to_string(c.scenario.variant) << "]: " << trace.rows() << " rows, t_end="
        << format_double(trace.times.back());
    if (!built.output_column.empty()) {
        out << ", final " << built.output_column << '=' << format_double(trace.column(built.output_column).back())
            << ", peak |" << built.rate_column << "|=" << format_double(peak_abs(trace.column(built.rate_column)));
    } else {
        for (const auto& col : built.trace_columns) {
            const auto& in = trace.input_names;
            if (trace.has_column(col) && std::find(in.begin(), in.end(), col) == in.end()) {
                out << ", final " << col << '=' << format_double(trace.column(col).back());
                break;
            }
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", wall);
    out << ", wall " << buf << " s -> " << path.string() << '\n';

    if (c.analyses.linearize && c.scenario.variant != Variant::conventional) do_linearize(c, out);
    if (c.analyses.sweep) do_sweep(c, out);
}

void do_list(std::ostream& out) {
    for (const auto& s : builtin_scenarios()) {
        out << s.name << "  (variants:";
        for (Variant v : s.variants) out << ' ' << to_string(v) << (v == s.default_variant ? "*" : "");
        out << ")\n    " << s.description << '\n';
    }
}

void do_export(const Options& o, std::ostream& out) {
    const RunConfig c = resolve_config(o);
    const std::string text = serialize_run_config(c);
    if (o.file.empty()) {
        out << text;
    } else {
        write_file_atomic(o.file, text);
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smooth and conventional rate-limiter simulation and small-signal analysis", "smoothrl"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Options o;

    auto* sim = app.add_subcommand("simulate", "Integrate a scenario and write trace.csv");
    add_run_options(sim, o);
    auto* lin = app.add_subcommand("linearize", "Write poles.csv and state_matrix.csv at the pre-disturbance equilibrium");
    add_run_options(lin, o);
    auto* swp = app.add_subcommand("sweep", "Sweep smooth-limiter gains and write metrics.csv");
    add_run_options(swp, o);
    swp->add_option("--k1", o.k1, "k1 grid (comma separated)")->delimiter(',');
    swp->add_option("--k2", o.k2, "k2 grid (comma separated)")->delimiter(',');
    swp->add_option("--k3", o.k3, "k3 grid (comma separated)")->delimiter(',');
    auto* lst = app.add_subcommand("list-scenarios", "List the built-in scenarios");
    auto* exp = app.add_subcommand("export-scenario", "Print a scenario as a canonical JSON configuration");
    add_scenario_options(exp, o);
    exp->add_option("--file", o.file, "Write to this file instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    }

    RunConfig cfg;
    try {
        if (lst->parsed()) {
            do_list(out);
            return ok;
        }
        if (exp->parsed()) {
            do_export(o, out);
            return ok;
        }
        cfg = resolve_config(o);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const InvalidParameters& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    }

    try {
        if (sim->parsed()) do_simulate(cfg, out);
        if (lin->parsed()) do_linearize(cfg, out);
        if (swp->parsed()) do_sweep(cfg, out);
    } catch (const UnsupportedRequest& e) {
        err << "refused: " << e.what() << '\n';
        return unsupported;
    } catch (const StiffnessError& e) {
        err << "numerical failure at t=" << format_double(e.time()) << ": " << e.what() << '\n';
        return numerical;
    } catch (const IntegrationError& e) {
        err << "numerical failure at t=" << format_double(e.time()) << ": " << e.what() << '\n';
        return numerical;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical;
    } catch (const InvalidParameters& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const CompositionError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    }
    return ok;
}

} // namespace smoothrl::cli
