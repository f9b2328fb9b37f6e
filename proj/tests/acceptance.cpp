// Acceptance checks. Prints one PASS/FAIL line per criterion followed by the
// measured quantities; exits non-zero if any criterion fails.

#include "smoothrl/blocks.hpp"
#include "smoothrl/eigen.hpp"
#include "smoothrl/errors.hpp"
#include "smoothrl/integrate.hpp"
#include "smoothrl/linalg.hpp"
#include "smoothrl/linear_analysis.hpp"
#include "smoothrl/rate_limiter.hpp"
#include "smoothrl/scenarios.hpp"
#include "smoothrl/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace smoothrl;
using cplx = std::complex<double>;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

RateLimiterParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> bound(-2, 1), gain(-1, 4), damp(-2, 1);
    return {std::pow(10, bound(rng)), -std::pow(10, bound(rng)), std::pow(10, gain(rng)), std::pow(10, gain(rng)),
            std::pow(10, damp(rng))};
}

InputSignal random_pwl(std::mt19937_64& rng, double horizon) {
    std::uniform_int_distribution<int> knots(2, 10);
    std::uniform_real_distribution<double> t(0, horizon), v(-2, 2);
    const int n = knots(rng);
    std::vector<double> inner;
    for (int k = 0; k < n - 2; ++k) inner.push_back(t(rng));
    std::sort(inner.begin(), inner.end());
    std::vector<double> ts{0.0}, vs{v(rng)};
    for (double x : inner) {
        ts.push_back(x);
        vs.push_back(v(rng));
    }
    ts.push_back(horizon);
    vs.push_back(v(rng));
    return InputSignal::piecewise_linear(ts, vs);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }
double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

Outcome criterion_boundedness() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    const int cases = 1000;
    int violations = 0;
    double worst_margin = -INFINITY; // max over cases of (excursion beyond bound) / bound
    std::size_t steps = 0;
    for (int k = 0; k < cases; ++k) {
        const auto p = random_params(rng);
        const auto sys = blocks::smooth_rate_limiter("rl", p);
        SimulationSetup setup{{random_pwl(rng, 10.0)}, {}, 0.0};
        AdaptiveOptions opt;
        opt.rtol = 1e-8;
        const auto tr = integrate_adaptive(sys, {0.0, 0.0}, {0.0, 10.0}, opt, setup);
        steps += tr.accepted_steps;
        const double scale = std::max(p.ydot_max(), -p.ydot_min());
        const double eps = 1e-7 * scale;
        const auto x = tr.column("x");
        const double hi = max_of(x) - p.ydot_max();
        const double lo = p.ydot_min() - min_of(x);
        worst_margin = std::max(worst_margin, std::max(hi, lo) / scale);
        if (hi > eps || lo > eps) ++violations;
    }
    const double elapsed = seconds_since(t0);
    o.detail << cases << " cases, " << steps << " accepted steps, " << violations
             << " violations, worst excursion/bound=" << worst_margin << ", " << elapsed << " s";
    o.require(violations == 0, "bound violated");
    o.require(elapsed < 60.0, "runtime >= 60 s");
    return o;
}

Outcome criterion_lyapunov_identity() {
    Outcome o;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> any(-100, 100), lg(-3, 6);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const RateLimiterParams p(std::pow(10, lg(rng) / 3), -std::pow(10, lg(rng) / 3), std::pow(10, lg(rng)),
                                  std::pow(10, lg(rng)), std::pow(10, lg(rng) / 3));
        const double u = any(rng), y = any(rng);
        for (double b : {p.ydot_max(), p.ydot_min()}) {
            const double expected = -p.k3() * b * b;
            worst = std::max(worst, std::abs(lyapunov_rate({y, b}, u, p) - expected) / std::abs(expected));
        }
    }
    o.detail << "10000 draws, worst relative error " << worst;
    o.require(worst <= 1e-12, "relative error > 1e-12");
    return o;
}

Outcome criterion_linearization() {
    Outcome o;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lg(-2, 3), uu(-1, 1);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const RateLimiterParams p(std::pow(10, lg(rng) / 2), -std::pow(10, lg(rng) / 2), std::pow(10, lg(rng)),
                                  std::pow(10, lg(rng)), std::pow(10, lg(rng) / 2));
        const double u = uu(rng);
        const std::vector<double> point{u, 0.0}, input{u};
        const auto j = numerical_jacobian(blocks::smooth_rate_limiter("rl", p), point, input);
        const auto lin = linearize_rl(p);
        for (std::size_t r = 0; r < 2; ++r) {
            for (std::size_t c = 0; c < 2; ++c) {
                const double ref = lin.a_matrix[r][c];
                worst = std::max(worst, std::abs(j.a(r, c) - ref) / std::max(1.0, std::abs(ref)));
            }
            const double ref = lin.b_vector[r];
            worst = std::max(worst, std::abs(j.b(r, 0) - ref) / std::max(1.0, std::abs(ref)));
        }
    }

    const auto lin = linearize_rl(RateLimiterParams::symmetric(0.05, 1800, 120, 0.1));
    Matrix a{{lin.a_matrix[0][0], lin.a_matrix[0][1]}, {lin.a_matrix[1][0], lin.a_matrix[1][1]}};
    const auto ev = eigenvalues(a);
    // lambda^2 - tr lambda + det = 0
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const cplx disc = std::sqrt(cplx(tr * tr - 4 * det));
    const cplx q1 = (tr + disc) / 2.0, q2 = (tr - disc) / 2.0;
    const cplx upper = q1.imag() >= q2.imag() ? q1 : q2;
    const double err = std::max(std::abs(ev[0] - upper), std::abs(ev[1] - std::conj(upper)));
    const bool printed = std::abs(ev[0].real() + 0.2) < 1e-9 && std::abs(std::abs(ev[0].imag()) - 2.11187) < 5e-6;

    o.detail << "Jacobian worst rel error " << worst << "; eigenvalues " << ev[0].real() << "+/-j" << ev[0].imag()
             << ", |solver - quadratic formula| = " << err;
    o.require(worst < 1e-6, "Jacobian rel error >= 1e-6");
    o.require(err <= 1e-9, "eigenvalues differ from quadratic formula");
    o.require(printed, "eigenvalues differ from -0.2 +/- j2.11187");
    return o;
}

Outcome criterion_step_response() {
    Outcome o;
    const auto t0 = Clock::now();
    auto smooth_cfg = default_scenario_config("step-response", Variant::smooth);
    smooth_cfg.solver.sample_interval = smooth_cfg.solver.h_ctrl;
    const auto s = run_scenario(smooth_cfg);
    const auto c = run_scenario(default_scenario_config("step-response", Variant::conventional));
    const double elapsed = seconds_since(t0);

    const auto ys = s.column("y");
    const auto yds = s.column("ydot");
    const double final_y = ys.back();
    const double peak_rate = peak_abs(yds);
    const double bound = 0.05;

    double max_dev = 0.0, t_dev = 0.0;
    const auto yc = c.column("y");
    for (std::size_t r = 0; r < c.rows(); ++r) {
        const double d = std::abs(s.interpolate("y", c.times[r]) - yc[r]);
        if (d > max_dev) {
            max_dev = d;
            t_dev = c.times[r];
        }
    }
    const double t_reach = first_crossing(c.times, yc, 0.15 - 1e-12);

    o.detail << "final y=" << final_y << ", max|ydot|=" << peak_rate << ", max|y_smooth - y_conv|=" << max_dev
             << " at t=" << t_dev << ", conventional reaches 0.15 at t=" << t_reach << ", " << elapsed << " s";
    o.require(std::abs(final_y - 0.15) <= 1e-3, "final y");
    o.require(peak_rate <= bound + 1e-7 * bound, "rate bound");
    o.require(max_dev < 0.005, "smooth/conventional deviation >= 0.005");
    o.require(std::abs(t_reach - 3.0) <= 0.02, "ramp arrival time");
    o.require(elapsed < 1.0, "runtime >= 1 s");
    return o;
}

Outcome criterion_regulator() {
    Outcome o;
    const auto reg = scenario_smooth_regulator();
    const auto i = reg.column("plant.i");
    const double ss_err = std::abs(i.back() - 15.0);
    const double os = overshoot_ratio(i, 15.0);
    const double ts = settling_time(reg.times, i, 15.0);
    o.detail << "regulator |i-15|=" << ss_err << ", overshoot=" << os << ", t_settle=" << ts << "; PI:";
    o.require(ss_err < 1e-3, "steady-state error");
    o.require(os <= 0.01, "regulator overshoot > 1%");

    for (const auto& g : default_pi_grid()) {
        if (g.ki <= 0.0) continue;
        const auto pi = scenario_pi_rl_loop(g.kp, g.ki);
        const auto ip = pi.column("plant.i");
        const double pts = settling_time(pi.times, ip, 15.0);
        const double pos = overshoot_ratio(ip, 15.0);
        o.detail << " (" << g.kp << "," << g.ki << ") ts=" << pts << " os=" << pos << ";";
        o.require(ts < pts, "regulator not faster than PI kp=" + std::to_string(g.kp) + " ki=" + std::to_string(g.ki));
        o.require(pos > 0.0, "PI without overshoot kp=" + std::to_string(g.kp) + " ki=" + std::to_string(g.ki));
    }
    return o;
}

Outcome criterion_stiff() {
    Outcome o;
    const auto t0 = Clock::now();
    SimulationTrace tr;
    try {
        tr = scenario_stiff_gfl(Variant::smooth);
    } catch (const StiffnessError& e) {
        o.require(false, std::string("step underflow: ") + e.what());
        return o;
    }
    const double elapsed = seconds_since(t0);
    const double bound = 5.0;
    const auto x = tr.column("rl.ydot");
    const double peak = peak_abs(x);
    const bool bounded = max_of(x) <= bound + 1e-7 * bound && min_of(x) >= -bound - 1e-7 * bound;

    const auto base = linearize_scenario(default_scenario_config("stiff-gfl", Variant::none));
    const auto smooth = linearize_scenario(default_scenario_config("stiff-gfl", Variant::smooth));
    const double moved = max_eigenvalue_displacement(base.eigenvalues, smooth.eigenvalues);

    o.detail << "t_end=" << tr.times.back() << ", " << tr.accepted_steps << " accepted steps, max|x|=" << peak
             << ", eigenvalues " << base.eigenvalues.size() << " -> " << smooth.eigenvalues.size()
             << ", max relative displacement " << moved << ", " << elapsed << " s";
    o.require(tr.times.back() == 2.0, "horizon not reached");
    o.require(bounded, "rate bound");
    o.require(moved >= 0.01, "eigenvalue displacement < 1%");
    return o;
}

Outcome criterion_multimachine() {
    Outcome o;
    const int n = 3;
    auto sample = [](Variant v) {
        auto c = default_scenario_config("multimachine", v);
        c.solver.sample_interval = 1e-3;
        return c;
    };
    const auto none = run_scenario(sample(Variant::none));
    const auto conv = run_scenario(default_scenario_config("multimachine", Variant::conventional));
    const auto smooth = run_scenario(sample(Variant::smooth));

    auto peak_omega = [&](const SimulationTrace& tr) {
        double p = 0.0;
        for (int i = 1; i <= n; ++i) p = std::max(p, peak_abs(tr.column("net.omega" + std::to_string(i))));
        return p;
    };
    const double pn = peak_omega(none), pc = peak_omega(conv), ps = peak_omega(smooth);

    double dev = 0.0;
    for (int i = 1; i <= n; ++i) {
        const std::string col = "net.omega" + std::to_string(i);
        const auto wc = conv.column(col);
        for (std::size_t r = 0; r < conv.rows(); ++r) dev = std::max(dev, std::abs(smooth.interpolate(col, conv.times[r]) - wc[r]));
    }

    const auto ln = linearize_scenario(default_scenario_config("multimachine", Variant::none));
    const auto ls = linearize_scenario(default_scenario_config("multimachine", Variant::smooth));
    const std::size_t extra_states = ls.state_names.size() - ln.state_names.size();
    const std::size_t extra_eigs = ls.eigenvalues.size() - ln.eigenvalues.size();
    const double moved = max_eigenvalue_displacement(ln.eigenvalues, ls.eigenvalues);

    o.detail << "peak|omega| none=" << pn << " conv=" << pc << " smooth=" << ps << "; max|omega_s - omega_c|=" << dev
             << " (" << 100.0 * dev / pc << "% of conv peak); +" << extra_states << " states, +" << extra_eigs
             << " eigenvalues; max displacement " << moved;
    o.require(pn > pc && pn > ps, "(a) no-limiter peak not strictly largest");
    o.require(dev <= 0.1 * pc, "(b) smooth/conventional mismatch > 10%");
    o.require(extra_states == 2 * n && extra_eigs == 2 * n, "(c) state bookkeeping");
    o.require(moved > 0.01, "(d) eigenvalue displacement <= 1%");
    return o;
}

// ||(A - l I) v|| for the unit vector v found by two steps of inverse iteration.
double eigen_residual(const Matrix& a, cplx l) {
    const std::size_t n = a.rows();
    Matrix m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a(i, j) - (i == j ? l.real() : 0.0);
            m(i, j) = v;
            m(n + i, n + j) = v;
        }
        m(i, n + i) = l.imag();
        m(n + i, i) = -l.imag();
    }
    Matrix shifted = m;
    for (std::size_t i = 0; i < 2 * n; ++i) shifted(i, i) += 1e-13 * (1.0 + a.norm_inf());
    std::vector<double> v(2 * n, 1.0);
    double res = 0.0;
    for (int it = 0; it < 2; ++it) {
        std::vector<double> w;
        try {
            w = lu_solve(shifted, v, 0.0);
        } catch (const SingularMatrixError&) {
            return 0.0;
        }
        double nrm = 0.0;
        for (double e : w) nrm += e * e;
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
        res = 0.0;
        for (double e : m * std::span<const double>(v)) res += e * e;
        res = std::sqrt(res);
    }
    return res;
}

double spectrum_distance(std::vector<cplx> a, std::vector<cplx> b) {
    double worst = 0.0;
    for (const auto& l : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cplx x, cplx y) { return std::abs(x - l) < std::abs(y - l); });
        worst = std::max(worst, std::abs(*it - l) / std::max(1.0, std::abs(l)));
        b.erase(it);
    }
    return worst;
}

Outcome criterion_eigensolver() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    auto random_matrix = [&](std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = g(rng);
        }
        return m;
    };

    // Companion matrix of z^n - r^n: roots r * exp(2 pi i k / n).
    double companion_err = 0.0;
    for (std::size_t n : {2u, 5u, 10u, 25u, 50u}) {
        const double r = 0.9;
        Matrix c(n, n);
        c(0, n - 1) = std::pow(r, static_cast<double>(n));
        for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1.0;
        std::vector<cplx> roots;
        for (std::size_t k = 0; k < n; ++k) roots.push_back(std::polar(r, 2 * std::numbers::pi * k / n));
        companion_err = std::max(companion_err, spectrum_distance(roots, eigenvalues(c)));
    }
    // Real roots -1..-6.
    {
        std::vector<double> coef{1.0};
        for (int k = 1; k <= 6; ++k) {
            std::vector<double> next(coef.size() + 1, 0.0);
            for (std::size_t i = 0; i < coef.size(); ++i) {
                next[i] += coef[i];
                next[i + 1] += k * coef[i];
            }
            coef = next;
        }
        Matrix c(6, 6);
        for (std::size_t j = 0; j < 6; ++j) c(0, j) = -coef[j + 1];
        for (std::size_t i = 1; i < 6; ++i) c(i, i - 1) = 1.0;
        std::vector<cplx> roots;
        for (int k = 1; k <= 6; ++k) roots.emplace_back(-k, 0.0);
        companion_err = std::max(companion_err, spectrum_distance(roots, eigenvalues(c)));
    }

    double similarity_err = 0.0, residual = 0.0;
    for (std::size_t n : {2u, 5u, 10u, 20u, 35u, 50u}) {
        const Matrix a = random_matrix(n);
        Matrix t = random_matrix(n);
        for (std::size_t i = 0; i < n; ++i) t(i, i) += 2.0 * std::sqrt(static_cast<double>(n));
        similarity_err = std::max(similarity_err, spectrum_distance(eigenvalues(a), eigenvalues(t * a * inverse(t))));
        for (const auto& l : eigenvalues(a)) residual = std::max(residual, eigen_residual(a, l) / a.norm_inf());
    }
    const double elapsed = seconds_since(t0);
    o.detail << "companion max rel error " << companion_err << ", similarity " << similarity_err
             << ", residual/||A|| " << residual << ", " << elapsed << " s";
    o.require(companion_err < 1e-8, "companion roots");
    o.require(similarity_err < 1e-7, "similarity invariance");
    o.require(residual < 1e-10, "eigen-residual");
    o.require(elapsed < 30.0, "runtime >= 30 s");
    return o;
}

Outcome criterion_rk4_order() {
    Outcome o;
    DynamicalSystem decay;
    decay.name = "decay";
    decay.state_names = {"y"};
    decay.rhs = [](double, std::span<const double> x, std::span<const double>, std::span<const double>,
                   std::span<double> dx) { dx[0] = -x[0]; };
    auto error = [&](double h) {
        const auto tr = integrate_fixed(decay, {1.0}, {0.0, 1.0}, h);
        return std::abs(tr.state(tr.rows() - 1)[0] - std::exp(-1.0));
    };
    double prev = error(0.1);
    o.detail << "error ratios:";
    for (double h : {0.05, 0.025, 0.0125}) {
        const double e = error(h);
        const double ratio = prev / e;
        o.detail << ' ' << ratio;
        o.require(std::abs(ratio - 16.0) <= 3.0, "ratio outside 16 +/- 3");
        prev = e;
    }
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"boundedness of the rate state", criterion_boundedness},
        {"Lyapunov boundary identity", criterion_lyapunov_identity},
        {"linearization oracle", criterion_linearization},
        {"step-response reproduction", criterion_step_response},
        {"smooth regulator vs PI", criterion_regulator},
        {"stiff regime", criterion_stiff},
        {"multi-machine analog", criterion_multimachine},
        {"eigensolver soundness", criterion_eigensolver},
        {"RK4 order", criterion_rk4_order},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("criterion %d %s: %s -- %s\n", index, o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
