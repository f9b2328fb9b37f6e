#include "smoothrl/scenarios.hpp"

#include "smoothrl/blocks.hpp"
#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smoothrl {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::none: return "none";
    case Variant::conventional: return "conventional";
    case Variant::smooth: return "smooth";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    for (Variant v : {Variant::none, Variant::conventional, Variant::smooth}) {
        if (to_string(v) == name) return v;
    }
    throw InvalidParameters("unknown variant '" + std::string(name) + "' (expected none, conventional or smooth)");
}

std::string_view to_string(Method m) noexcept { return m == Method::rk4 ? "rk4" : "adaptive"; }

Method parse_method(std::string_view name) {
    if (name == "rk4") return Method::rk4;
    if (name == "adaptive") return Method::adaptive;
    throw InvalidParameters("unknown method '" + std::string(name) + "' (expected rk4 or adaptive)");
}

void SolverSettings::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameters(std::string(what) + " must be positive and finite");
    };
    auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameters(std::string(what) + " must be >= 0 and finite");
    };
    non_negative(horizon, "horizon");
    positive(h, "h");
    positive(rtol, "rtol");
    positive(atol, "atol");
    non_negative(h_ctrl, "h_ctrl");
    non_negative(sample_interval, "sample_interval");
}

namespace {

constexpr double two_pi_60 = 2.0 * 3.14159265358979323846 * 60.0;

ParameterMap limiter_defaults(double bound, double k1, double k2, double k3) {
    return {{"ydot_max", bound}, {"ydot_min", -bound}, {"k1", k1}, {"k2", k2}, {"k3", k3}};
}

ParameterMap merged(ParameterMap a, const ParameterMap& b) {
    a.insert(b.begin(), b.end());
    return a;
}

std::vector<ScenarioInfo> make_builtins() {
    std::vector<ScenarioInfo> list;

    SolverSettings step_solver;
    step_solver.horizon = 30.0;
    step_solver.h_ctrl = 0.01;
    list.push_back({"step-response",
                    "Step of the limiter input from 0 to 0.15 pu with rate bounds of 0.05 pu/s",
                    {Variant::conventional, Variant::smooth},
                    Variant::smooth,
                    merged(limiter_defaults(0.05, 1800.0, 120.0, 0.1),
                           {{"u_initial", 0.0}, {"u_final", 0.15}, {"t_step", 0.0}}),
                    step_solver});

    SolverSettings pi_solver;
    pi_solver.method = Method::rk4;
    pi_solver.h = 1e-4;
    pi_solver.h_ctrl = 1e-4;
    list.push_back({"pi-rl-loop",
                    "PI current controller whose output passes through a rate limiter, on an R-L plant",
                    {Variant::conventional, Variant::none},
                    Variant::conventional,
                    merged(limiter_defaults(5.0, 155.5, 63.0, 10.0),
                           {{"kp", 0.5}, {"ki", 5.0}, {"l", 1e-3}, {"r", 0.1}, {"i_ref", 15.0}, {"t_step", 0.0}}),
                    pi_solver});

    SolverSettings reg_solver;
    reg_solver.h = 1e-5;
    reg_solver.h_ctrl = 1e-4;
    list.push_back({"smooth-regulator",
                    "Smooth limiter in regulator form driving the R-L plant current to its reference",
                    {Variant::smooth},
                    Variant::smooth,
                    merged(limiter_defaults(5.0, 155.5, 63.0, 10.0),
                           {{"l", 1e-3}, {"r", 0.1}, {"i_ref", 15.0}, {"t_step", 0.0}}),
                    reg_solver});

    SolverSettings gfl_solver;
    gfl_solver.horizon = 2.0;
    gfl_solver.h = 1e-5;
    gfl_solver.h_ctrl = 1e-4;
    list.push_back({"stiff-gfl",
                    "Cascaded power and current PI loops with a stiff smooth limiter on the voltage command",
                    {Variant::none, Variant::conventional, Variant::smooth},
                    Variant::smooth,
                    merged(limiter_defaults(5.0, 14.5e6, 2.69e3, 0.1),
                           {{"l", 5e-4},
                            {"r", 0.01},
                            {"kp_inner", 0.5},
                            {"ki_inner", 10.0},
                            {"kp_outer", 0.1},
                            {"ki_outer", 20.0},
                            {"p_ref", 1e-3},
                            {"t_step", 0.0}}),
                    gfl_solver});

    SolverSettings mm_solver;
    mm_solver.horizon = 20.0;
    mm_solver.h_ctrl = 1e-3;
    list.push_back({"multimachine",
                    "Swing-equation machines with governors whose torque output is rate limited",
                    {Variant::none, Variant::conventional, Variant::smooth},
                    Variant::smooth,
                    merged(limiter_defaults(0.1, 1e4, 300.0, 0.1),
                           {{"n_machines", 3.0},
                            {"omega_s", two_pi_60},
                            {"inertia_h", 4.0},
                            {"damping", 1.0},
                            {"governor_time_constant", 0.5},
                            {"droop", 0.05},
                            {"disturbance", 0.7},
                            {"disturbance_machine", 1.0},
                            {"t_step", 0.0}}),
                    mm_solver});
    return list;
}

ParameterMap resolve_parameters(const ScenarioInfo& info, const ParameterMap& given) {
    ParameterMap out = info.parameters;
    for (const auto& [key, value] : given) {
        const auto it = out.find(key);
        if (it == out.end()) throw InvalidParameters("scenario '" + info.name + "' has no parameter '" + key + "'");
        if (!std::isfinite(value)) throw InvalidParameters("parameter '" + key + "' must be finite");
        it->second = value;
    }
    return out;
}

RateLimiterParams limiter(const ParameterMap& p) {
    return RateLimiterParams(p.at("ydot_max"), p.at("ydot_min"), p.at("k1"), p.at("k2"), p.at("k3"));
}

double rate_bound(const RateLimiterParams& rl) { return std::max(rl.ydot_max(), -rl.ydot_min()); }

std::string num(std::size_t k) { return std::to_string(k); }

BuiltScenario build_step(const ParameterMap& p, Variant v, const SolverSettings& s) {
    const auto rl = limiter(p);
    const double u0 = p.at("u_initial");
    BuiltScenario b;
    b.setup.inputs = {InputSignal::step(p.at("t_step"), u0, p.at("u_final"))};
    b.span = {0.0, s.horizon};
    if (v == Variant::smooth) {
        b.system = blocks::smooth_rate_limiter("rl", rl);
        b.x0 = {u0, 0.0};
    } else {
        b.system = blocks::conventional_rate_limiter("rl", rl);
        b.setup.z0 = {u0, 0.0};
    }
    b.trace_columns = {"u", "y", "ydot"};
    b.output_column = "y";
    b.rate_column = "ydot";
    b.rate_bound = rate_bound(rl);
    b.pre_inputs = {u0};
    return b;
}

BuiltScenario build_pi_loop(const ParameterMap& p, Variant v, const SolverSettings& s) {
    const auto rl = limiter(p);
    std::vector<DynamicalSystem> parts;
    parts.push_back(blocks::summation("err", {1.0, -1.0}));
    parts.push_back(blocks::pi_controller("pi", {p.at("kp"), p.at("ki")}));
    if (v == Variant::conventional) parts.push_back(blocks::conventional_rate_limiter("rl", rl));
    parts.push_back(blocks::rl_plant("plant", {p.at("l"), p.at("r")}));

    Wiring w;
    w.external_inputs = {"i_ref"};
    w.connections = {{"err.in1", "i_ref"}, {"err.in2", "plant.i"}, {"pi.e", "err.y"}};
    if (v == Variant::conventional) {
        w.connections.push_back({"rl.u", "pi.v"});
        w.connections.push_back({"plant.v", "rl.y"});
    } else {
        w.connections.push_back({"plant.v", "pi.v"});
    }

    BuiltScenario b;
    b.system = compose("pi-rl-loop", std::move(parts), w);
    b.x0.assign(b.system.dimension(), 0.0);
    b.setup.inputs = {InputSignal::step(p.at("t_step"), 0.0, p.at("i_ref"))};
    b.span = {0.0, s.horizon};
    b.trace_columns = {"i_ref", "plant.i", "pi.v", "pi.integral"};
    if (v == Variant::conventional) {
        b.trace_columns.insert(b.trace_columns.end(), {"rl.y", "rl.ydot"});
        b.output_column = "rl.y";
        b.rate_column = "rl.ydot";
        b.rate_bound = rate_bound(rl);
    }
    b.pre_inputs = {0.0};
    return b;
}

BuiltScenario build_regulator(const ParameterMap& p, Variant, const SolverSettings& s) {
    const auto rl = limiter(p);
    std::vector<DynamicalSystem> parts;
    parts.push_back(blocks::summation("err", {1.0, -1.0}));
    parts.push_back(blocks::smooth_regulator("rl", rl));
    parts.push_back(blocks::rl_plant("plant", {p.at("l"), p.at("r")}));
    Wiring w;
    w.external_inputs = {"i_ref"};
    w.connections = {{"err.in1", "i_ref"}, {"err.in2", "plant.i"}, {"rl.g", "err.y"}, {"plant.v", "rl.y"}};

    BuiltScenario b;
    b.system = compose("smooth-regulator", std::move(parts), w);
    b.x0.assign(b.system.dimension(), 0.0);
    b.setup.inputs = {InputSignal::step(p.at("t_step"), 0.0, p.at("i_ref"))};
    b.span = {0.0, s.horizon};
    b.trace_columns = {"i_ref", "plant.i", "rl.y", "rl.ydot"};
    b.output_column = "rl.y";
    b.rate_column = "rl.ydot";
    b.rate_bound = rate_bound(rl);
    b.pre_inputs = {0.0};
    return b;
}

BuiltScenario build_gfl(const ParameterMap& p, Variant v, const SolverSettings& s) {
    const auto rl = limiter(p);
    std::vector<DynamicalSystem> parts;
    parts.push_back(blocks::summation("outer_err", {1.0, -1.0}));
    parts.push_back(blocks::pi_controller("outer", {p.at("kp_outer"), p.at("ki_outer")}));
    parts.push_back(blocks::summation("inner_err", {1.0, -1.0}));
    parts.push_back(blocks::pi_controller("inner", {p.at("kp_inner"), p.at("ki_inner")}));
    if (v == Variant::smooth) parts.push_back(blocks::smooth_rate_limiter("rl", rl));
    if (v == Variant::conventional) parts.push_back(blocks::conventional_rate_limiter("rl", rl));
    parts.push_back(blocks::rl_plant("plant", {p.at("l"), p.at("r")}));

    Wiring w;
    w.external_inputs = {"p_ref"};
    w.connections = {{"outer_err.in1", "p_ref"}, {"outer_err.in2", "plant.i"}, {"outer.e", "outer_err.y"},
                     {"inner_err.in1", "outer.v"}, {"inner_err.in2", "plant.i"}, {"inner.e", "inner_err.y"}};
    if (v == Variant::none) {
        w.connections.push_back({"plant.v", "inner.v"});
    } else {
        w.connections.push_back({"rl.u", "inner.v"});
        w.connections.push_back({"plant.v", "rl.y"});
    }

    BuiltScenario b;
    b.system = compose("stiff-gfl", std::move(parts), w);
    b.x0.assign(b.system.dimension(), 0.0);
    b.setup.inputs = {InputSignal::step(p.at("t_step"), 0.0, p.at("p_ref"))};
    b.span = {0.0, s.horizon};
    b.trace_columns = {"p_ref", "plant.i", "outer.v", "inner.v"};
    if (v != Variant::none) {
        b.trace_columns.insert(b.trace_columns.end(), {"rl.y", "rl.ydot"});
        b.output_column = "rl.y";
        b.rate_column = "rl.ydot";
        b.rate_bound = rate_bound(rl);
    }
    b.pre_inputs = {0.0};
    return b;
}

struct NetworkData {
    std::vector<double> p0;
    std::vector<double> load;
    Matrix b;
};

NetworkData network_data(std::size_t n) {
    NetworkData d;
    if (n == 3) {
        d.p0 = {0.9, 0.7, 0.6};
        d.load = {0.6, 0.8, 0.8};
        d.b = Matrix{{0.0, 5.0, 4.0}, {5.0, 0.0, 6.0}, {4.0, 6.0, 0.0}};
        return d;
    }
    d.p0.assign(n, 0.7);
    d.load.assign(n, 0.7);
    d.b = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) d.b(i, j) = 4.0 + static_cast<double>((i + j) % 3);
        }
    }
    return d;
}

// Governor-network system without limiters: states [theta2..n, omega1..n, tau1..n].
void add_machines(std::size_t n, const ParameterMap& p, const NetworkData& d,
                                         std::vector<DynamicalSystem>& parts, Wiring& w) {
    std::vector<blocks::SwingMachine> machines(n);
    for (std::size_t i = 0; i < n; ++i) machines[i] = {p.at("inertia_h"), p.at("damping"), d.load[i]};
    parts.push_back(blocks::swing_network("net", machines, d.b, p.at("omega_s")));
    const blocks::Governor gov{p.at("governor_time_constant"), p.at("droop")};
    for (std::size_t i = 1; i <= n; ++i) {
        parts.push_back(blocks::governor("gov" + num(i), gov));
        w.external_inputs.push_back("p_order" + num(i));
        w.connections.push_back({"gov" + num(i) + ".omega", "net.omega" + num(i)});
        w.connections.push_back({"gov" + num(i) + ".p_order", "p_order" + num(i)});
    }
}

BuiltScenario build_multimachine(const ParameterMap& p, Variant v, const SolverSettings& s) {
    const double n_real = p.at("n_machines");
    if (n_real < 2.0 || n_real > 50.0 || n_real != std::floor(n_real)) {
        throw InvalidParameters("n_machines must be an integer in [2, 50]");
    }
    const auto n = static_cast<std::size_t>(n_real);
    const double dm = p.at("disturbance_machine");
    if (dm < 1.0 || dm > n_real || dm != std::floor(dm)) {
        throw InvalidParameters("disturbance_machine must be an integer in [1, n_machines]");
    }
    const auto disturbed = static_cast<std::size_t>(dm);
    const auto rl = limiter(p);
    const NetworkData d = network_data(n);

    // Pre-disturbance equilibrium of the limiter-free system.
    std::vector<DynamicalSystem> base_parts;
    Wiring base_w;
    add_machines(n, p, d, base_parts, base_w);
    for (std::size_t i = 1; i <= n; ++i) base_w.connections.push_back({"net.tm" + num(i), "gov" + num(i) + ".tau"});
    const DynamicalSystem base = compose("multimachine", base_parts, base_w);

    Matrix lap(n - 1, n - 1);
    Vector injection(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        injection[i - 1] = d.p0[i] - d.load[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            lap(i - 1, i - 1) += d.b(i, j);
            if (j > 0) lap(i - 1, j - 1) -= d.b(i, j);
        }
    }
    const Vector theta_guess = lu_solve(lap, injection);
    Vector guess(base.dimension(), 0.0);
    std::copy(theta_guess.begin(), theta_guess.end(), guess.begin());
    for (std::size_t i = 0; i < n; ++i) guess[(n - 1) + n + i] = d.p0[i];
    const Vector eq = find_equilibrium(base, d.p0, guess);

    BuiltScenario b;
    b.span = {0.0, s.horizon};
    b.pre_inputs = d.p0;
    for (std::size_t i = 0; i < n; ++i) {
        const double extra = (i + 1 == disturbed) ? p.at("disturbance") : 0.0;
        b.setup.inputs.push_back(InputSignal::step(p.at("t_step"), d.p0[i], d.p0[i] + extra));
    }
    for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("p_order" + num(i));
    for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("net.omega" + num(i));
    for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("gov" + num(i) + ".tau");

    if (v == Variant::none) {
        b.system = base;
        b.x0 = eq;
        return b;
    }

    std::vector<DynamicalSystem> parts;
    Wiring w;
    add_machines(n, p, d, parts, w);
    const auto tau_star = std::span<const double>(eq).subspan((n - 1) + n, n);
    b.x0 = eq;
    b.rate_bound = rate_bound(rl);
    if (v == Variant::smooth) {
        parts.push_back(blocks::smooth_rate_limiter_bank("rl", std::vector<RateLimiterParams>(n, rl)));
        for (std::size_t i = 1; i <= n; ++i) {
            w.connections.push_back({"rl.u" + num(i), "gov" + num(i) + ".tau"});
            w.connections.push_back({"net.tm" + num(i), "rl.y" + num(i)});
        }
        b.x0.insert(b.x0.end(), tau_star.begin(), tau_star.end());
        b.x0.insert(b.x0.end(), n, 0.0);
        for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("rl.y" + num(i));
        for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("rl.ydot" + num(i));
        b.output_column = "rl.y1";
        b.rate_column = "rl.ydot1";
    } else {
        for (std::size_t i = 1; i <= n; ++i) {
            const std::string name = "rl" + num(i);
            parts.push_back(blocks::conventional_rate_limiter(name, rl));
            w.connections.push_back({name + ".u", "gov" + num(i) + ".tau"});
            w.connections.push_back({"net.tm" + num(i), name + ".y"});
            b.setup.z0.push_back(tau_star[i - 1]);
            b.setup.z0.push_back(0.0);
        }
        for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("rl" + num(i) + ".y");
        for (std::size_t i = 1; i <= n; ++i) b.trace_columns.push_back("rl" + num(i) + ".ydot");
        b.output_column = "rl1.y";
        b.rate_column = "rl1.ydot";
    }
    b.system = compose("multimachine", std::move(parts), w);
    return b;
}

} // namespace

const std::vector<ScenarioInfo>& builtin_scenarios() {
    static const std::vector<ScenarioInfo> list = make_builtins();
    return list;
}

const ScenarioInfo& find_scenario(std::string_view name) {
    for (const auto& s : builtin_scenarios()) {
        if (s.name == name) return s;
    }
    std::string known;
    for (const auto& s : builtin_scenarios()) known += (known.empty() ? "" : ", ") + s.name;
    throw InvalidParameters("unknown scenario '" + std::string(name) + "' (known: " + known + ")");
}

ScenarioConfig default_scenario_config(std::string_view name) {
    return default_scenario_config(name, find_scenario(name).default_variant);
}

ScenarioConfig default_scenario_config(std::string_view name, Variant variant) {
    const auto& info = find_scenario(name);
    return {info.name, variant, info.parameters, info.solver};
}

BuiltScenario build_scenario(const ScenarioConfig& config) {
    const auto& info = find_scenario(config.scenario);
    if (std::find(info.variants.begin(), info.variants.end(), config.variant) == info.variants.end()) {
        throw InvalidParameters("scenario '" + info.name + "' has no '" + std::string(to_string(config.variant)) +
                                "' variant");
    }
    config.solver.validate();
    if (config.variant == Variant::conventional && !(config.solver.h_ctrl > 0.0)) {
        throw InvalidParameters("the conventional limiter needs a control period h_ctrl > 0");
    }
    const ParameterMap p = resolve_parameters(info, config.parameters);
    BuiltScenario b;
    if (info.name == "step-response") {
        b = build_step(p, config.variant, config.solver);
    } else if (info.name == "pi-rl-loop") {
        b = build_pi_loop(p, config.variant, config.solver);
    } else if (info.name == "smooth-regulator") {
        b = build_regulator(p, config.variant, config.solver);
    } else if (info.name == "stiff-gfl") {
        b = build_gfl(p, config.variant, config.solver);
    } else {
        b = build_multimachine(p, config.variant, config.solver);
    }
    if (config.variant == Variant::conventional) b.setup.h_ctrl = config.solver.h_ctrl;
    return b;
}

SimulationTrace simulate(const BuiltScenario& built, const SolverSettings& solver) {
    solver.validate();
    if (solver.method == Method::rk4) return integrate_fixed(built.system, built.x0, built.span, solver.h, built.setup);
    AdaptiveOptions o;
    o.rtol = solver.rtol;
    o.atol = solver.atol;
    o.sample_interval = solver.sample_interval;
    return integrate_adaptive(built.system, built.x0, built.span, o, built.setup);
}

SimulationTrace run_scenario(const ScenarioConfig& config) { return simulate(build_scenario(config), config.solver); }

LinearizationResult linearize_scenario(const ScenarioConfig& config) {
    if (config.variant == Variant::conventional) {
        throw UnsupportedRequest(
            "the conventional rate limiter is a discontinuous right-hand side with no Jacobian; at an equilibrium it "
            "is inactive, so linearizing it silently drops the rate limits. Use --variant smooth, or --variant none "
            "for the limiter-free baseline");
    }
    const BuiltScenario b = build_scenario(config);
    return small_signal_report(b.system, b.pre_inputs, b.x0);
}

SimulationTrace scenario_step_response(Variant variant) {
    return run_scenario(default_scenario_config("step-response", variant));
}

SimulationTrace scenario_pi_rl_loop(double kp, double ki) {
    auto c = default_scenario_config("pi-rl-loop", Variant::conventional);
    c.parameters["kp"] = kp;
    c.parameters["ki"] = ki;
    return run_scenario(c);
}

SimulationTrace scenario_smooth_regulator() { return run_scenario(default_scenario_config("smooth-regulator")); }

SimulationTrace scenario_stiff_gfl(Variant variant) {
    return run_scenario(default_scenario_config("stiff-gfl", variant));
}

SimulationTrace scenario_multimachine(Variant variant, int n_machines) {
    auto c = default_scenario_config("multimachine", variant);
    c.parameters["n_machines"] = n_machines;
    return run_scenario(c);
}

std::vector<PiGain> default_pi_grid() {
    std::vector<PiGain> g;
    for (double kp : {0.1, 0.5, 1.0}) {
        for (double ki : {0.0, 1.0, 5.0, 10.0}) g.push_back({kp, ki});
    }
    return g;
}

double settling_time(const std::vector<double>& t, const std::vector<double>& v, double target, double band) {
    if (t.empty() || t.size() != v.size()) throw InvalidParameters("settling_time: empty or mismatched series");
    const double tol = band * std::abs(target - v.front());
    if (std::abs(v.back() - target) > tol) return std::numeric_limits<double>::infinity();
    for (std::size_t k = v.size(); k-- > 0;) {
        if (std::abs(v[k] - target) > tol) return t[k + 1];
    }
    return t.front();
}

double overshoot_ratio(const std::vector<double>& v, double target) {
    if (v.empty() || target == 0.0) return 0.0;
    const double peak = target > 0 ? *std::max_element(v.begin(), v.end()) : *std::min_element(v.begin(), v.end());
    return std::max(0.0, (peak - target) / target);
}

double peak_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

double first_crossing(const std::vector<double>& t, const std::vector<double>& v, double level) {
    for (std::size_t k = 0; k < v.size() && k < t.size(); ++k) {
        if (std::abs(v[k]) >= level) return t[k];
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace smoothrl
