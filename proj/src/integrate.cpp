#include "smoothrl/integrate.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smoothrl {

Vector evaluate_inputs(const std::vector<InputSignal>& inputs, double t) {
    Vector u(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) u[k] = inputs[k].at(t);
    return u;
}

namespace {

std::string time_str(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

class Stepper {
public:
    Stepper(const DynamicalSystem& sys, const SimulationSetup& setup, SimulationTrace& trace)
        : sys_(sys), setup_(setup), trace_(trace) {}

    // Derivative at (t, x) with discrete state z held.
    void f(double t, const Vector& x, const Vector& z, Vector& out) {
        u_ = evaluate_inputs(setup_.inputs, t);
        out.assign(sys_.dimension(), 0.0);
        if (sys_.rhs) sys_.rhs(t, x, z, u_, out);
        ++trace_.rhs_evaluations;
    }

    void record(double t, const Vector& x, const Vector& z) {
        u_ = evaluate_inputs(setup_.inputs, t);
        const Vector y = sys_.outputs(t, x, z, u_);
        trace_.append(t, u_, x, z, y);
    }

    void discrete_update(double t, const Vector& x, Vector& z, double h) {
        u_ = evaluate_inputs(setup_.inputs, t);
        Vector next(z.size());
        sys_.update(t, x, z, u_, h, next);
        if (!all_finite(next)) throw IntegrationError("non-finite discrete state at t=" + time_str(t), t);
        z = std::move(next);
    }

private:
    const DynamicalSystem& sys_;
    const SimulationSetup& setup_;
    SimulationTrace& trace_;
    Vector u_;
};

SimulationTrace prepare(const DynamicalSystem& sys, const Vector& x0, TimeSpan span, const SimulationSetup& setup,
                        Vector& z0) {
    sys.validate();
    if (x0.size() != sys.dimension()) throw InvalidParameters("initial state has wrong dimension");
    if (setup.inputs.size() != sys.input_count()) throw InvalidParameters("one input signal required per system input");
    if (!std::isfinite(span.start) || !std::isfinite(span.end) || span.end < span.start) {
        throw InvalidParameters("time span must be finite and non-decreasing");
    }
    if (!all_finite(x0)) throw InvalidParameters("initial state must be finite");
    z0 = setup.z0.empty() ? Vector(sys.discrete_dimension(), 0.0) : setup.z0;
    if (z0.size() != sys.discrete_dimension()) throw InvalidParameters("initial discrete state has wrong dimension");
    if (setup.h_ctrl < 0.0 || !std::isfinite(setup.h_ctrl)) throw InvalidParameters("h_ctrl must be >= 0");

    SimulationTrace trace;
    trace.input_names = sys.input_names;
    trace.state_names = sys.state_names;
    trace.discrete_names = sys.discrete_names;
    trace.output_names = sys.output_names;
    return trace;
}

// Uniform grid start + k * step up to end; the last point is end itself.
std::vector<double> grid(TimeSpan span, double step) {
    std::vector<double> pts;
    const double length = span.end - span.start;
    const auto whole = static_cast<std::size_t>(std::floor(length / step + 1e-9));
    pts.reserve(whole + 1);
    for (std::size_t k = 1; k <= whole; ++k) pts.push_back(span.start + static_cast<double>(k) * step);
    if (!pts.empty() && std::abs(pts.back() - span.end) <= 1e-9 * step) pts.back() = span.end;
    if (pts.empty() || pts.back() < span.end) pts.push_back(span.end);
    return pts;
}

void rk4_step(Stepper& s, double t, double h, Vector& x, const Vector& z) {
    const std::size_t n = x.size();
    Vector k1, k2, k3, k4, tmp(n);
    s.f(t, x, z, k1);
    if (!all_finite(k1)) throw IntegrationError("non-finite derivative at t=" + time_str(t), t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    s.f(t + 0.5 * h, tmp, z, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    s.f(t + 0.5 * h, tmp, z, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    s.f(t + h, tmp, z, k4);
    if (!all_finite(k2) || !all_finite(k3) || !all_finite(k4)) {
        throw IntegrationError("non-finite derivative in step from t=" + time_str(t), t);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace

SimulationTrace integrate_fixed(const DynamicalSystem& sys, const Vector& x0, TimeSpan span, double h,
                                const SimulationSetup& setup) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameters("fixed step h must be positive and finite");
    Vector z;
    SimulationTrace trace = prepare(sys, x0, span, setup, z);
    Stepper s(sys, setup, trace);
    Vector x = x0;
    s.record(span.start, x, z);
    if (span.end == span.start) return trace;

    if (!sys.is_hybrid()) {
        double t = span.start;
        for (double t_next : grid(span, h)) {
            rk4_step(s, t, t_next - t, x, z);
            ++trace.accepted_steps;
            t = t_next;
            s.record(t, x, z);
        }
        return trace;
    }

    const double h_ctrl = setup.h_ctrl > 0.0 ? setup.h_ctrl : h;
    double a = span.start;
    for (double b : grid(span, h_ctrl)) {
        const double len = b - a;
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h - 1e-9)));
        const double hs = len / static_cast<double>(m);
        double t = a;
        for (std::size_t k = 1; k <= m; ++k) {
            const double t_next = k == m ? b : a + static_cast<double>(k) * hs;
            if (sys.dimension() > 0) rk4_step(s, t, t_next - t, x, z);
            ++trace.accepted_steps;
            t = t_next;
            if (k < m) s.record(t, x, z);
        }
        s.discrete_update(b, x, z, len);
        s.record(b, x, z);
        a = b;
    }
    return trace;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Dense output (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

class Dopri {
public:
    Dopri(Stepper& s, const AdaptiveOptions& o, SimulationTrace& trace, std::size_t n)
        : s_(s), o_(o), trace_(trace), n_(n) {}

    double initial_step(double t, const Vector& x, const Vector& z, double span) {
        Vector f0;
        s_.f(t, x, z, f0);
        if (!all_finite(f0)) throw IntegrationError("non-finite derivative at t=" + time_str(t), t);
        double d0 = 0, d1n = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = o_.atol + o_.rtol * std::abs(x[i]);
            d0 = std::max(d0, std::abs(x[i]) / sc);
            d1n = std::max(d1n, std::abs(f0[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, span);
        Vector x1(n_), f1;
        for (std::size_t i = 0; i < n_; ++i) x1[i] = x[i] + h0 * f0[i];
        s_.f(t + h0, x1, z, f1);
        double d2 = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = o_.atol + o_.rtol * std::abs(x[i]);
            d2 = std::max(d2, std::abs(f1[i] - f0[i]) / sc / h0);
        }
        if (!std::isfinite(d2)) return std::max(o_.h_min, h0 * 1e-3);
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        return std::clamp(std::min(100.0 * h0, h1), o_.h_min, std::min(o_.h_max, span));
    }

    // Integrates x from a to b with z held. Calls on_step(t_old, t_new, h) after each accepted step.
    template <class OnStep>
    void run(double a, double b, Vector& x, const Vector& z, double& h, OnStep&& on_step) {
        const std::size_t n = n_;
        Vector k1, k2, k3, k4, k5, k6, k7, tmp(n), x_new(n);
        double t = a;
        s_.f(t, x, z, k1);
        if (!all_finite(k1)) throw IntegrationError("non-finite derivative at t=" + time_str(t), t);
        bool rejected_last = false;
        while (t < b) {
            if (trace_.accepted_steps + trace_.rejected_steps >= o_.max_steps) {
                throw IntegrationError("step budget exhausted at t=" + time_str(t), t);
            }
            h = std::min(h, o_.h_max);
            const double h_planned = h;
            bool last = false;
            if (t + h >= b || b - (t + h) <= 1e-12 * std::max(1.0, std::abs(b))) {
                h = b - t;
                last = true;
            }
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * a21 * k1[i];
            s_.f(t + c2 * h, tmp, z, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
            s_.f(t + c3 * h, tmp, z, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            s_.f(t + c4 * h, tmp, z, k4);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            s_.f(t + c5 * h, tmp, z, k5);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            const double t_new = last ? b : t + h;
            s_.f(t_new, tmp, z, k6);
            for (std::size_t i = 0; i < n; ++i)
                x_new[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            s_.f(t_new, x_new, z, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = o_.atol + o_.rtol * std::max(std::abs(x[i]), std::abs(x_new[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                if (dense_wanted_) {
                    r1_ = x;
                    r2_.resize(n);
                    r3_.resize(n);
                    r4_.resize(n);
                    r5_.resize(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        r2_[i] = x_new[i] - x[i];
                        r3_[i] = h * k1[i] - r2_[i];
                        r4_[i] = r2_[i] - h * k7[i] - r3_[i];
                        r5_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                    }
                    step_t_ = t;
                    step_h_ = h;
                }
                const double t_old = t;
                x = x_new;
                k1 = k7;
                t = t_new;
                ++trace_.accepted_steps;
                on_step(t_old, t, h);
                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (rejected_last) fac = std::min(fac, 1.0);
                rejected_last = false;
                h = (last ? std::max(h, h_planned) : h) * fac;
            } else {
                ++trace_.rejected_steps;
                rejected_last = true;
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < o_.h_min) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "step size underflow (h < " << o_.h_min << ") at t=" << t << "; system is too stiff for "
                       << "the requested tolerances";
                    throw StiffnessError(os.str(), t, x);
                }
            }
        }
    }

    void want_dense(bool v) { dense_wanted_ = v; }

    // Dense output within the last accepted step.
    Vector dense(double t) const {
        const double th = (t - step_t_) / step_h_;
        const double th1 = 1.0 - th;
        Vector out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            out[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
        }
        return out;
    }

private:
    Stepper& s_;
    const AdaptiveOptions& o_;
    SimulationTrace& trace_;
    std::size_t n_;
    bool dense_wanted_ = false;
    Vector r1_, r2_, r3_, r4_, r5_;
    double step_t_ = 0.0, step_h_ = 1.0;
};

} // namespace

SimulationTrace integrate_adaptive(const DynamicalSystem& sys, const Vector& x0, TimeSpan span,
                                   const AdaptiveOptions& o, const SimulationSetup& setup) {
    if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw InvalidParameters("tolerances must be > 0");
    if (!(o.h_min > 0.0) || !(o.h_max >= o.h_min)) throw InvalidParameters("need 0 < h_min <= h_max");
    if (o.h_init > 0.0 && (o.h_init < o.h_min || o.h_init > o.h_max)) {
        throw InvalidParameters("need h_min <= h_init <= h_max");
    }
    if (o.sample_interval < 0.0 || !std::isfinite(o.sample_interval)) {
        throw InvalidParameters("sample_interval must be >= 0");
    }
    Vector z;
    SimulationTrace trace = prepare(sys, x0, span, setup, z);
    if (sys.is_hybrid() && !(setup.h_ctrl > 0.0)) {
        throw InvalidParameters("adaptive integration of a hybrid system needs a control period h_ctrl > 0");
    }
    Stepper s(sys, setup, trace);
    Vector x = x0;
    s.record(span.start, x, z);
    if (span.end == span.start) return trace;

    const bool sampling = o.sample_interval > 0.0;
    std::vector<double> samples;
    std::size_t next_sample = 0;
    if (sampling) samples = grid(span, o.sample_interval);

    std::vector<double> intervals = sys.is_hybrid() ? grid(span, setup.h_ctrl) : std::vector<double>{span.end};
    Dopri dp(s, o, trace, sys.dimension());
    dp.want_dense(sampling);

    double h = 0.0;
    double a = span.start;
    for (double b : intervals) {
        if (sys.dimension() > 0) {
            if (h <= 0.0) h = o.h_init > 0.0 ? o.h_init : dp.initial_step(a, x, z, b - a);
            dp.run(a, b, x, z, h, [&](double, double t_new, double) {
                if (sampling) {
                    while (next_sample < samples.size() && samples[next_sample] < b &&
                           samples[next_sample] <= t_new) {
                        const double ts = samples[next_sample++];
                        s.record(ts, dp.dense(ts), z);
                    }
                } else if (t_new < b || !sys.is_hybrid()) {
                    s.record(t_new, x, z);
                }
            });
        }
        if (sys.is_hybrid()) s.discrete_update(b, x, z, b - a);
        if (sampling) {
            while (next_sample < samples.size() && samples[next_sample] <= b) {
                s.record(samples[next_sample++], x, z);
            }
        } else if (sys.is_hybrid() || sys.dimension() == 0) {
            s.record(b, x, z);
        }
        a = b;
    }
    return trace;
}

} // namespace smoothrl
