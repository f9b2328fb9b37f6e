#include "smoothrl/blocks.hpp"

#include "smoothrl/errors.hpp"
#include "smoothrl/kernels.hpp"

#include <cmath>
#include <memory>

namespace smoothrl::blocks {

namespace {

using In = std::span<const double>;
using Out = std::span<double>;

std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

DynamicalSystem two_state_limiter(std::string name, const RateLimiterParams& p, std::string input,
                                  RlDerivative (*rhs)(RlState, double, const RateLimiterParams&) noexcept) {
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = {"y", "x"};
    s.input_names = {std::move(input)};
    s.output_names = {"y", "ydot"};
    s.rhs = [p, rhs](double, In x, In, In u, Out dx) {
        const auto d = rhs({x[0], x[1]}, u[0], p);
        dx[0] = d.dy;
        dx[1] = d.dx;
    };
    s.output = [](double, In x, In, In, Out y) {
        y[0] = x[0];
        y[1] = x[1];
    };
    return s;
}

} // namespace

DynamicalSystem smooth_rate_limiter(std::string name, const RateLimiterParams& p) {
    return two_state_limiter(std::move(name), p, "u", &smooth_rl_rhs);
}

DynamicalSystem smooth_regulator(std::string name, const RateLimiterParams& p) {
    return two_state_limiter(std::move(name), p, "g", &regulator_rhs);
}

DynamicalSystem conventional_rate_limiter(std::string name, const RateLimiterParams& p) {
    DynamicalSystem s;
    s.name = std::move(name);
    s.discrete_names = {"y", "rate"};
    s.input_names = {"u"};
    s.output_names = {"y", "ydot"};
    s.output = [](double, In, In z, In, Out y) {
        y[0] = z[0];
        y[1] = z[1];
    };
    s.update = [p](double, In, In z, In u, double h, Out z_next) {
        const double y_now = conventional_rl_step(z[0], u[0], h, p);
        z_next[0] = y_now;
        z_next[1] = (y_now - z[0]) / h;
    };
    return s;
}

DynamicalSystem smooth_rate_limiter_bank(std::string name, const std::vector<RateLimiterParams>& params) {
    const std::size_t n = params.size();
    auto bank = std::make_shared<const RateLimiterBank>(params);
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = numbered("y", n);
    for (auto& x : numbered("x", n)) s.state_names.push_back(std::move(x));
    s.input_names = numbered("u", n);
    s.output_names = numbered("y", n);
    for (auto& x : numbered("ydot", n)) s.output_names.push_back(std::move(x));
    s.rhs = [bank, n](double, In x, In, In u, Out dx) {
        smooth_rl_rhs_batch(*bank, x.first(n), x.subspan(n, n), u, dx.first(n), dx.subspan(n, n));
    };
    s.output = [](double, In x, In, In, Out y) { std::copy(x.begin(), x.end(), y.begin()); };
    return s;
}

DynamicalSystem rl_plant(std::string name, PlantRL plant) {
    if (!(plant.l > 0.0) || !(plant.r >= 0.0)) throw InvalidParameters("RL plant: need l > 0 and r >= 0");
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = {"i"};
    s.input_names = {"v"};
    s.output_names = {"i"};
    s.rhs = [plant](double, In x, In, In u, Out dx) { dx[0] = (-plant.r * x[0] + u[0]) / plant.l; };
    s.output = [](double, In x, In, In, Out y) { y[0] = x[0]; };
    return s;
}

DynamicalSystem pi_controller(std::string name, PiController pi) {
    if (!(pi.ki >= 0.0) || !std::isfinite(pi.kp)) throw InvalidParameters("PI controller: need ki >= 0, finite kp");
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = {"integral"};
    s.input_names = {"e"};
    s.output_names = {"v"};
    s.feedthrough = true;
    s.rhs = [](double, In, In, In u, Out dx) { dx[0] = u[0]; };
    s.output = [pi](double, In x, In, In u, Out y) { y[0] = pi.kp * u[0] + pi.ki * x[0]; };
    return s;
}

DynamicalSystem summation(std::string name, std::vector<double> signs) {
    DynamicalSystem s;
    s.name = std::move(name);
    s.input_names = numbered("in", signs.size());
    s.output_names = {"y"};
    s.feedthrough = true;
    s.output = [signs = std::move(signs)](double, In, In, In u, Out y) {
        double acc = 0.0;
        for (std::size_t k = 0; k < signs.size(); ++k) acc += signs[k] * u[k];
        y[0] = acc;
    };
    return s;
}

DynamicalSystem gain(std::string name, double k) {
    DynamicalSystem s;
    s.name = std::move(name);
    s.input_names = {"u"};
    s.output_names = {"y"};
    s.feedthrough = true;
    s.output = [k](double, In, In, In u, Out y) { y[0] = k * u[0]; };
    return s;
}

DynamicalSystem integrator(std::string name) {
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = {"y"};
    s.input_names = {"u"};
    s.output_names = {"y"};
    s.rhs = [](double, In, In, In u, Out dx) { dx[0] = u[0]; };
    s.output = [](double, In x, In, In, Out y) { y[0] = x[0]; };
    return s;
}

Vector network_power(const Matrix& b, std::span<const double> theta) {
    const std::size_t n = b.rows();
    Vector pe(n, 0.0);
    auto delta = [&](std::size_t i) { return i == 0 ? 0.0 : theta[i - 1]; };
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && b(i, j) != 0.0) s += b(i, j) * std::sin(delta(i) - delta(j));
        }
        pe[i] = s;
    }
    return pe;
}

DynamicalSystem swing_network(std::string name, std::vector<SwingMachine> machines, Matrix susceptance,
                              double omega_s) {
    const std::size_t n = machines.size();
    if (n < 2) throw InvalidParameters("swing network: need at least two machines");
    if (susceptance.rows() != n || susceptance.cols() != n) throw InvalidParameters("swing network: B must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(machines[i].inertia_h > 0.0)) throw InvalidParameters("swing network: inertia H must be > 0");
        for (std::size_t j = 0; j < n; ++j) {
            if (susceptance(i, j) != susceptance(j, i)) throw InvalidParameters("swing network: B must be symmetric");
        }
    }
    DynamicalSystem s;
    s.name = std::move(name);
    for (std::size_t i = 2; i <= n; ++i) s.state_names.push_back("theta" + std::to_string(i));
    for (auto& w : numbered("omega", n)) s.state_names.push_back(std::move(w));
    s.input_names = numbered("tm", n);
    s.output_names = numbered("omega", n);
    for (auto& p : numbered("pe", n)) s.output_names.push_back(std::move(p));

    auto b = std::make_shared<const Matrix>(std::move(susceptance));
    s.rhs = [machines, b, n, omega_s](double, In x, In, In u, Out dx) {
        const auto theta = x.first(n - 1);
        const auto omega = x.subspan(n - 1, n);
        const Vector pe = network_power(*b, theta);
        for (std::size_t i = 1; i < n; ++i) dx[i - 1] = omega_s * (omega[i] - omega[0]);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = machines[i];
            dx[n - 1 + i] = (u[i] - m.load - pe[i] - m.damping * omega[i]) / (2.0 * m.inertia_h);
        }
    };
    s.output = [b, n](double, In x, In, In, Out y) {
        const Vector pe = network_power(*b, x.first(n - 1));
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[n - 1 + i];
            y[n + i] = pe[i];
        }
    };
    return s;
}

DynamicalSystem governor(std::string name, Governor gov) {
    if (!(gov.time_constant > 0.0) || !(gov.droop > 0.0)) {
        throw InvalidParameters("governor: time constant and droop must be > 0");
    }
    DynamicalSystem s;
    s.name = std::move(name);
    s.state_names = {"tau"};
    s.input_names = {"omega", "p_order"};
    s.output_names = {"tau"};
    s.rhs = [gov](double, In x, In, In u, Out dx) {
        dx[0] = (u[1] - u[0] / gov.droop - x[0]) / gov.time_constant;
    };
    s.output = [](double, In x, In, In, Out y) { y[0] = x[0]; };
    return s;
}

} // namespace smoothrl::blocks
