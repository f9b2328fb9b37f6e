#include "smoothrl/blocks.hpp"
#include "smoothrl/errors.hpp"
#include "smoothrl/integrate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace smoothrl;

namespace {

DynamicalSystem decay() {
    DynamicalSystem s;
    s.name = "decay";
    s.state_names = {"y"};
    s.output_names = {"y"};
    s.rhs = [](double, auto x, auto, auto, auto dx) { dx[0] = -x[0]; };
    s.output = [](double, auto x, auto, auto, auto y) { y[0] = x[0]; };
    return s;
}

DynamicalSystem oscillator() {
    DynamicalSystem s;
    s.name = "osc";
    s.state_names = {"y1", "y2"};
    s.rhs = [](double, auto x, auto, auto, auto dx) {
        dx[0] = x[1];
        dx[1] = -x[0];
    };
    return s;
}

double rk4_error(double h) {
    const auto tr = integrate_fixed(decay(), {1.0}, {0.0, 1.0}, h);
    return std::abs(tr.state(tr.rows() - 1)[0] - std::exp(-1.0));
}

} // namespace

TEST_CASE("RK4 on exponential decay") {
    const auto tr = integrate_fixed(decay(), {1.0}, {0.0, 1.0}, 1e-3);
    CHECK(tr.times.back() == 1.0);
    CHECK(tr.rows() == 1001);
    CHECK(std::abs(tr.state(tr.rows() - 1)[0] - 0.36787944117144233) < 1e-9);
}

TEST_CASE("RK4 is fourth order") {
    double prev = rk4_error(0.1);
    for (double h : {0.05, 0.025, 0.0125}) {
        const double e = rk4_error(h);
        CHECK(prev / e == doctest::Approx(16.0).epsilon(3.0 / 16.0));
        prev = e;
    }
}

TEST_CASE("RK4 harmonic oscillator returns after one period") {
    const auto tr = integrate_fixed(oscillator(), {1.0, 0.0}, {0.0, 2 * std::numbers::pi}, 1e-3);
    const auto last = tr.state(tr.rows() - 1);
    CHECK(std::abs(last[0] - 1.0) < 1e-8);
    CHECK(std::abs(last[1]) < 1e-8);
    CHECK(tr.times.back() == 2 * std::numbers::pi);
}

TEST_CASE("zero derivative gives a constant trace") {
    DynamicalSystem s;
    s.name = "still";
    s.state_names = {"a", "b"};
    s.rhs = [](double, auto, auto, auto, auto dx) { dx[0] = dx[1] = 0.0; };
    const auto tr = integrate_fixed(s, {3.0, -4.0}, {0.0, 1.0}, 0.1);
    for (std::size_t r = 0; r < tr.rows(); ++r) {
        CHECK(tr.state(r)[0] == 3.0);
        CHECK(tr.state(r)[1] == -4.0);
    }
}

TEST_CASE("fixed-step validation and non-finite derivatives") {
    CHECK_THROWS_AS(integrate_fixed(decay(), {1.0}, {0.0, 1.0}, 0.0), InvalidParameters);
    CHECK_THROWS_AS(integrate_fixed(decay(), {1.0}, {1.0, 0.0}, 0.1), InvalidParameters);
    CHECK_THROWS_AS(integrate_fixed(decay(), {1.0, 2.0}, {0.0, 1.0}, 0.1), InvalidParameters);

    DynamicalSystem blow;
    blow.name = "blow";
    blow.state_names = {"y"};
    blow.rhs = [](double t, auto, auto, auto, auto dx) { dx[0] = t > 0.5 ? NAN : 1.0; };
    try {
        integrate_fixed(blow, {0.0}, {0.0, 1.0}, 0.1);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.time() > 0.4);
        CHECK(e.time() < 0.6);
    }
}

TEST_CASE("adaptive Dormand-Prince accuracy and counters") {
    AdaptiveOptions o;
    o.rtol = 1e-9;
    o.atol = 1e-12;
    const auto tr = integrate_adaptive(decay(), {1.0}, {0.0, 1.0}, o);
    CHECK(tr.times.back() == 1.0);
    CHECK(std::abs(tr.state(tr.rows() - 1)[0] - std::exp(-1.0)) < 1e-7);
    CHECK(tr.accepted_steps + 1 == tr.rows());
    CHECK(tr.rhs_evaluations > 0);
    for (std::size_t r = 1; r < tr.rows(); ++r) CHECK(tr.times[r] > tr.times[r - 1]);
}

TEST_CASE("adaptive zero-length horizon returns the initial state") {
    const auto tr = integrate_adaptive(oscillator(), {0.25, 0.5}, {0.0, 0.0});
    REQUIRE(tr.rows() == 1);
    CHECK(tr.state(0)[0] == 0.25);
    CHECK(tr.state(0)[1] == 0.5);
}

TEST_CASE("adaptive dense output on a sample grid") {
    AdaptiveOptions o;
    o.sample_interval = 0.1;
    const auto tr = integrate_adaptive(oscillator(), {1.0, 0.0}, {0.0, 1.0}, o);
    REQUIRE(tr.rows() == 11);
    for (std::size_t r = 0; r < tr.rows(); ++r) {
        CHECK(tr.times[r] == doctest::Approx(0.1 * static_cast<double>(r)).epsilon(1e-12));
        CHECK(tr.state(r)[0] == doctest::Approx(std::cos(tr.times[r])).epsilon(1e-7));
    }
}

TEST_CASE("adaptive and fixed-step traces agree on a non-stiff system") {
    const auto p = RateLimiterParams::symmetric(0.05, 1800, 120, 0.1);
    const auto sys = blocks::smooth_rate_limiter("rl", p);
    SimulationSetup setup{{InputSignal::step(0.0, 0.0, 0.15)}, {}, 0.0};
    AdaptiveOptions o;
    const auto ad = integrate_adaptive(sys, {0.0, 0.0}, {0.0, 10.0}, o, setup);
    const auto fx = integrate_fixed(sys, {0.0, 0.0}, {0.0, 10.0}, 1e-3, setup);
    double worst = 0.0;
    for (std::size_t r = 0; r < ad.rows(); ++r) {
        worst = std::max(worst, std::abs(ad.state(r)[0] - fx.interpolate("y", ad.times[r])));
    }
    // Linear interpolation of the 1 ms reference dominates; y'' <= ~0.7.
    CHECK(worst < 10 * std::max(o.rtol, o.atol) + 0.7 * 1e-6 / 8);
}

TEST_CASE("step underflow raises StiffnessError with time and state") {
    DynamicalSystem stiff;
    stiff.name = "stiff relaxation";
    stiff.state_names = {"y"};
    stiff.rhs = [](double t, auto x, auto, auto, auto dx) { dx[0] = -1e9 * (x[0] - std::cos(t)); };
    AdaptiveOptions o;
    o.h_min = 1e-6;
    try {
        integrate_adaptive(stiff, {0.0}, {0.0, 1.0}, o);
        FAIL("expected StiffnessError");
    } catch (const StiffnessError& e) {
        CHECK(e.time() >= 0.0);
        CHECK(e.time() < 1.0);
        REQUIRE(e.state().size() == 1);
        CHECK(std::isfinite(e.state()[0]));
    }
}

TEST_CASE("adaptive option validation") {
    AdaptiveOptions o;
    o.rtol = 0.0;
    CHECK_THROWS_AS(integrate_adaptive(decay(), {1.0}, {0.0, 1.0}, o), InvalidParameters);
    o = {};
    o.h_init = 1e-20;
    CHECK_THROWS_AS(integrate_adaptive(decay(), {1.0}, {0.0, 1.0}, o), InvalidParameters);
}

TEST_CASE("hybrid stepping: conventional limiter ramps then tracks") {
    const auto p = RateLimiterParams::symmetric(0.05, 1800, 120, 0.1);
    const auto sys = blocks::conventional_rate_limiter("rl", p);
    SimulationSetup setup{{InputSignal::step(0.0, 0.0, 0.15)}, {0.0, 0.0}, 0.01};
    const auto tr = integrate_fixed(sys, {}, {0.0, 5.0}, 0.01, setup);
    const auto y = tr.column("y");
    const auto yd = tr.column("ydot");
    REQUIRE(tr.rows() == 501);
    CHECK(y[1] == doctest::Approx(0.0005));
    CHECK(y[300] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(y[299] < 0.15);
    for (std::size_t r = 1; r < tr.rows(); ++r) {
        // Two regimes only: clamped slope or exact tracking.
        const bool clamped = std::abs(std::abs(yd[r]) - 0.05) < 1e-9;
        const bool tracking = std::abs(y[r] - 0.15) < 1e-12;
        CHECK((clamped || tracking));
    }

    AdaptiveOptions o;
    const auto ad = integrate_adaptive(sys, {}, {0.0, 5.0}, o, setup);
    CHECK(ad.column("y") == y);

    SimulationSetup no_ctrl{{InputSignal::constant(0.0)}, {}, 0.0};
    CHECK_THROWS_AS(integrate_adaptive(sys, {}, {0.0, 1.0}, o, no_ctrl), InvalidParameters);
}

TEST_CASE("hybrid stepping substeps continuous states inside a control period") {
    Wiring w{{"u"}, {{"rl.u", "u"}, {"int.u", "rl.y"}}};
    const auto sys = compose("held", {blocks::conventional_rate_limiter("rl", RateLimiterParams::symmetric(1, 1, 1, 1)),
                                      blocks::integrator("int")},
                             w);
    SimulationSetup setup{{InputSignal::constant(1.0)}, {0.0, 0.0}, 0.1};
    const auto tr = integrate_fixed(sys, {0.0}, {0.0, 0.3}, 0.025, setup);
    CHECK(tr.rows() == 13);
    // Held output: 0 on (0, 0.1], 0.1 on (0.1, 0.2], 0.2 on (0.2, 0.3].
    CHECK(tr.column("int.y").back() == doctest::Approx(0.1 * 0.1 + 0.2 * 0.1).epsilon(1e-12));
}

TEST_CASE("trace CSV has a header and 17 significant digits") {
    const auto tr = integrate_fixed(decay(), {1.0}, {0.0, 0.2}, 0.1);
    const std::string csv = to_csv(tr);
    std::istringstream in(csv);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "t,y");
    CHECK(row0 == "0,1");
    CHECK(row1.rfind("0.10000000000000001,0.9048374999", 0) == 0);
    CHECK(to_csv(tr) == csv);
    CHECK(tr.interpolate("y", 0.05) == doctest::Approx(0.5 * (1.0 + tr.state(1)[0])));
    CHECK_THROWS_AS(tr.column("missing"), std::out_of_range);
}

TEST_CASE("evaluate_inputs") {
    const auto u = evaluate_inputs({InputSignal::constant(1), InputSignal::step(1, 2, 3)}, 1.0);
    CHECK(u == std::vector<double>{1.0, 3.0});
}
