#include "smoothrl/errors.hpp"
#include "smoothrl/scenarios.hpp"
#include "smoothrl/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

using namespace smoothrl;

TEST_CASE("catalogue and defaults") {
    const auto& all = builtin_scenarios();
    CHECK(all.size() == 5);
    for (const auto& s : all) {
        CAPTURE(s.name);
        CHECK(std::find(s.variants.begin(), s.variants.end(), s.default_variant) != s.variants.end());
        CHECK_NOTHROW(s.solver.validate());
        CHECK_NOTHROW(build_scenario(default_scenario_config(s.name)));
    }
    CHECK_THROWS_AS(find_scenario("nope"), InvalidParameters);
    CHECK(default_scenario_config("step-response").variant == Variant::smooth);
    CHECK(parse_variant("conventional") == Variant::conventional);
    CHECK_THROWS_AS(parse_variant("fast"), InvalidParameters);
    CHECK(parse_method("rk4") == Method::rk4);
    CHECK(to_string(Method::adaptive) == "adaptive");
}

TEST_CASE("build_scenario validates names, variants and values") {
    auto c = default_scenario_config("smooth-regulator");
    c.variant = Variant::none;
    CHECK_THROWS_AS(build_scenario(c), InvalidParameters);

    c = default_scenario_config("step-response");
    c.parameters["k9"] = 1.0;
    CHECK_THROWS_AS(build_scenario(c), InvalidParameters);

    c = default_scenario_config("step-response");
    c.parameters["k1"] = -1.0;
    CHECK_THROWS_AS(build_scenario(c), InvalidParameters);

    c = default_scenario_config("step-response");
    c.solver.h = 0.0;
    c.solver.method = Method::rk4;
    CHECK_THROWS_AS(build_scenario(c), InvalidParameters);
}

TEST_CASE("step response: smooth limiter settles on the new input with bounded rate") {
    const auto tr = scenario_step_response(Variant::smooth);
    const auto y = tr.column("y");
    const auto yd = tr.column("ydot");
    CHECK(y.back() == doctest::Approx(0.15).epsilon(1e-3 / 0.15));
    CHECK(peak_abs(yd) <= 0.05 + 1e-7 * 0.05);
    CHECK(y.front() == 0.0);
}

TEST_CASE("step response: conventional ramp reaches the target at 3 s") {
    const auto tr = scenario_step_response(Variant::conventional);
    const auto y = tr.column("y");
    const auto t = tr.times;
    const auto it = std::find_if(y.begin(), y.end(), [](double v) { return v >= 0.15 - 1e-12; });
    REQUIRE(it != y.end());
    CHECK(t[static_cast<std::size_t>(it - y.begin())] == doctest::Approx(3.0).epsilon(0.02 / 3.0));
}

TEST_CASE("zero-amplitude step leaves the limiter at rest") {
    auto c = default_scenario_config("step-response");
    c.parameters["u_final"] = 0.0;
    c.solver.horizon = 2.0;
    const auto tr = run_scenario(c);
    CHECK(peak_abs(tr.column("y")) == 0.0);
    CHECK(peak_abs(tr.column("ydot")) == 0.0);
}

TEST_CASE("regulator with zero reference stays at zero") {
    auto c = default_scenario_config("smooth-regulator");
    c.parameters["i_ref"] = 0.0;
    c.solver.horizon = 0.5;
    const auto tr = run_scenario(c);
    CHECK(peak_abs(tr.column("plant.i")) == 0.0);
}

TEST_CASE("PI loop and regulator reach the current reference") {
    const auto pi = scenario_pi_rl_loop(0.5, 5.0);
    CHECK(pi.column("plant.i").back() == doctest::Approx(15.0).epsilon(1e-3));
    CHECK(peak_abs(pi.column("rl.ydot")) <= 5.0 * (1 + 1e-9));

    const auto reg = scenario_smooth_regulator();
    const auto i = reg.column("plant.i");
    CHECK(std::abs(i.back() - 15.0) < 1e-3);
    CHECK(overshoot_ratio(i, 15.0) <= 0.01);
    CHECK(peak_abs(reg.column("rl.ydot")) < 5.0);
    CHECK(default_pi_grid().size() == 12);
}

TEST_CASE("linearization per scenario") {
    const auto lin = linearize_scenario(default_scenario_config("step-response"));
    REQUIRE(lin.eigenvalues.size() == 2);
    CHECK(lin.eigenvalues[0].real() == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(lin.stable);
    CHECK_THROWS_AS(linearize_scenario(default_scenario_config("step-response", Variant::conventional)),
                    UnsupportedRequest);

    const auto none = linearize_scenario(default_scenario_config("multimachine", Variant::none));
    const auto smooth = linearize_scenario(default_scenario_config("multimachine", Variant::smooth));
    CHECK(smooth.eigenvalues.size() == none.eigenvalues.size() + 6);
    CHECK(smooth.stable);
}

TEST_CASE("multimachine with a different machine count") {
    auto c = default_scenario_config("multimachine", Variant::smooth);
    c.parameters["n_machines"] = 4;
    c.parameters["disturbance_machine"] = 2;
    c.solver.horizon = 2.0;
    const auto b = build_scenario(c);
    auto cn = c;
    cn.variant = Variant::none;
    CHECK(b.system.dimension() == build_scenario(cn).system.dimension() + 8);
    CHECK_NOTHROW(run_scenario(c));
    c.parameters["disturbance_machine"] = 9;
    CHECK_THROWS_AS(build_scenario(c), InvalidParameters);
}

TEST_CASE("runs are deterministic") {
    auto c = default_scenario_config("step-response");
    c.solver.horizon = 3.0;
    CHECK(to_csv(run_scenario(c)) == to_csv(run_scenario(c)));
}

TEST_CASE("trace metrics") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    CHECK(settling_time(t, {0, 0.5, 1.1, 1.01, 1.0}, 1.0) == 3.0);
    CHECK(settling_time(t, {1, 1, 1, 1, 1}, 1.0) == 0.0);
    CHECK(std::isinf(settling_time(t, {0, 0.5, 1.1, 1.01, 0.9}, 1.0)));
    CHECK(overshoot_ratio({0, 1.2, 1.0}, 1.0) == doctest::Approx(0.2));
    CHECK(overshoot_ratio({0, 0.9}, 1.0) == 0.0);
    CHECK(peak_abs({1, -3, 2}) == 3.0);
    CHECK(first_crossing(t, {0, 0.2, 0.6, 1, 1}, 0.5) == 2.0);
    CHECK(std::isinf(first_crossing(t, {0, 0, 0, 0, 0}, 0.5)));
}

TEST_CASE("gain sweep: order, invalid rows, parallel determinism, CSV") {
    auto base = default_scenario_config("step-response");
    base.solver.horizon = 10.0;
    SweepGrid g{{0.0, 1800.0}, {60.0, 240.0}, {}};
    const auto rows = sweep_gains(base, g, 1);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].k1 == 0.0);
    CHECK(rows[0].status == "invalid");
    CHECK(rows[2].k1 == 1800.0);
    CHECK(rows[2].k2 == 60.0);
    CHECK(rows[3].k2 == 240.0);
    CHECK(rows[3].k3 == 0.1);
    CHECK(rows[2].status == "valid");
    CHECK(rows[3].overshoot < rows[2].overshoot);
    CHECK(rows[3].dominant_pole_re < 0.0);

    const auto par = sweep_gains(base, g, 4);
    std::ostringstream a, b;
    write_metrics_csv(a, rows);
    write_metrics_csv(b, par);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("k1,k2,k3,status,settling_time,overshoot,peak_ydot,dominant_pole_re,rise_time_ydot\n", 0) == 0);

    CHECK_THROWS_AS(sweep_gains(default_scenario_config("pi-rl-loop"), g, 1), InvalidParameters);
}
