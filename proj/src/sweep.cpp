#include "smoothrl/sweep.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace smoothrl {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

SweepRow evaluate(ScenarioConfig cfg, double k1, double k2, double k3) {
    SweepRow row{k1, k2, k3, "valid", nan, nan, nan, nan, nan, {}};
    cfg.parameters["k1"] = k1;
    cfg.parameters["k2"] = k2;
    cfg.parameters["k3"] = k3;
    BuiltScenario built;
    try {
        built = build_scenario(cfg);
    } catch (const InvalidParameters& e) {
        row.status = "invalid";
        row.message = e.what();
        return row;
    }
    try {
        const SimulationTrace tr = simulate(built, cfg.solver);
        const auto y = tr.column(built.output_column);
        const auto x = tr.column(built.rate_column);
        const double dir = (y.back() > y.front()) - (y.back() < y.front());
        const double ymax = cfg.parameters.at("ydot_max");
        const double ymin = cfg.parameters.at("ydot_min");

        row.settling_time = settling_time(tr.times, y, y.back());
        double against = 0.0;
        for (double v : x) against = std::max(against, -dir * v);
        row.overshoot = dir == 0.0 ? 0.0 : against / (dir > 0 ? -ymin : ymax);
        row.peak_ydot = peak_abs(x);
        row.rise_time_ydot = first_crossing(tr.times, x, 0.9 * (dir < 0 ? -ymin : ymax));
        try {
            const auto lin = linearize_scenario(cfg);
            row.dominant_pole_re = lin.eigenvalues.empty() ? nan : lin.eigenvalues.front().real();
        } catch (const NumericalError& e) {
            row.message = e.what();
        }
    } catch (const NumericalError& e) {
        row.status = "failed";
        row.message = e.what();
    }
    return row;
}

} // namespace

std::vector<SweepRow> sweep_gains(const ScenarioConfig& base, const SweepGrid& grid, unsigned jobs) {
    const auto& info = find_scenario(base.scenario);
    if (std::find(info.variants.begin(), info.variants.end(), Variant::smooth) == info.variants.end()) {
        throw InvalidParameters("scenario '" + info.name + "' has no smooth limiter to sweep");
    }
    ScenarioConfig cfg = base;
    cfg.variant = Variant::smooth;
    for (const auto& [k, v] : info.parameters) cfg.parameters.try_emplace(k, v);

    auto axis = [&](const std::vector<double>& a, const char* key) {
        return a.empty() ? std::vector<double>{cfg.parameters.at(key)} : a;
    };
    const auto a1 = axis(grid.k1, "k1");
    const auto a2 = axis(grid.k2, "k2");
    const auto a3 = axis(grid.k3, "k3");

    struct Point {
        double k1, k2, k3;
    };
    std::vector<Point> points;
    for (double k1 : a1) {
        for (double k2 : a2) {
            for (double k3 : a3) points.push_back({k1, k2, k3});
        }
    }

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            rows[i] = evaluate(cfg, points[i].k1, points[i].k2, points[i].k3);
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

void write_metrics_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "k1,k2,k3,status,settling_time,overshoot,peak_ydot,dominant_pole_re,rise_time_ydot\n";
    for (const auto& r : rows) {
        os << format_double(r.k1) << ',' << format_double(r.k2) << ',' << format_double(r.k3) << ',' << r.status << ','
           << format_double(r.settling_time) << ',' << format_double(r.overshoot) << ','
           << format_double(r.peak_ydot) << ',' << format_double(r.dominant_pole_re) << ','
           << format_double(r.rise_time_ydot) << '\n';
    }
}

} // namespace smoothrl
