#include "smoothrl/linear_analysis.hpp"

#include "smoothrl/eigen.hpp"
#include "smoothrl/errors.hpp"
#include "smoothrl/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace smoothrl {

namespace {

void require_continuous(const DynamicalSystem& sys, const char* what) {
    sys.validate();
    if (sys.is_hybrid()) {
        throw UnsupportedRequest(std::string(what) + ": system '" + sys.name +
                                 "' has discrete states; the conventional limiter has no Jacobian");
    }
}

void require_inputs(const DynamicalSystem& sys, std::span<const double> u) {
    if (u.size() != sys.input_count()) {
        throw InvalidParameters("expected " + std::to_string(sys.input_count()) + " frozen inputs, got " +
                                std::to_string(u.size()));
    }
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

double fd_step(double v) { return std::max(1e-7, 1e-7 * std::abs(v)); }

Vector eval(const DynamicalSystem& sys, std::span<const double> x, std::span<const double> u) {
    return sys.derivative(0.0, x, {}, u);
}

void check_probe(const Vector& f, const std::string& component) {
    for (double v : f) {
        if (!std::isfinite(v)) throw NumericalError("non-finite derivative while perturbing " + component);
    }
}

} // namespace

Jacobians numerical_jacobian(const DynamicalSystem& sys, std::span<const double> point,
                             std::span<const double> frozen_inputs) {
    require_continuous(sys, "numerical_jacobian");
    require_inputs(sys, frozen_inputs);
    const std::size_t n = sys.dimension();
    const std::size_t m = sys.input_count();
    if (point.size() != n) throw InvalidParameters("numerical_jacobian: point has wrong dimension");
    for (double v : point) {
        if (!std::isfinite(v)) throw InvalidParameters("numerical_jacobian: point must be finite");
    }

    Jacobians j{Matrix(n, n), Matrix(n, m)};
    Vector x(point.begin(), point.end());
    for (std::size_t k = 0; k < n; ++k) {
        const double x0 = x[k];
        const double d = fd_step(x0);
        x[k] = x0 + d;
        const Vector fp = eval(sys, x, frozen_inputs);
        check_probe(fp, "state '" + sys.state_names[k] + "'");
        x[k] = x0 - d;
        const Vector fm = eval(sys, x, frozen_inputs);
        check_probe(fm, "state '" + sys.state_names[k] + "'");
        x[k] = x0;
        for (std::size_t i = 0; i < n; ++i) j.a(i, k) = (fp[i] - fm[i]) / (2.0 * d);
    }
    Vector u(frozen_inputs.begin(), frozen_inputs.end());
    for (std::size_t k = 0; k < m; ++k) {
        const double u0 = u[k];
        const double d = fd_step(u0);
        u[k] = u0 + d;
        const Vector fp = eval(sys, x, u);
        check_probe(fp, "input '" + sys.input_names[k] + "'");
        u[k] = u0 - d;
        const Vector fm = eval(sys, x, u);
        check_probe(fm, "input '" + sys.input_names[k] + "'");
        u[k] = u0;
        for (std::size_t i = 0; i < n; ++i) j.b(i, k) = (fp[i] - fm[i]) / (2.0 * d);
    }
    return j;
}

Vector find_equilibrium(const DynamicalSystem& sys, std::span<const double> frozen_inputs, Vector guess,
                        const EquilibriumOptions& options) {
    require_continuous(sys, "find_equilibrium");
    require_inputs(sys, frozen_inputs);
    if (!(options.tol > 0.0) || options.max_iter < 1) {
        throw InvalidParameters("find_equilibrium: tol must be > 0 and max_iter >= 1");
    }
    if (guess.size() != sys.dimension()) throw InvalidParameters("find_equilibrium: guess has wrong dimension");
    for (double v : guess) {
        if (!std::isfinite(v)) throw InvalidParameters("find_equilibrium: guess must be finite");
    }

    Vector x = std::move(guess);
    Vector f = eval(sys, x, frozen_inputs);
    double res = norm_inf(f);
    for (int it = 0; it < options.max_iter && res >= options.tol; ++it) {
        const Matrix a = numerical_jacobian(sys, x, frozen_inputs).a;
        Vector rhs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
        Vector dx;
        try {
            dx = lu_solve(a, std::move(rhs));
        } catch (const SingularMatrixError&) {
            throw SingularMatrixError("find_equilibrium: singular Jacobian at iteration " + std::to_string(it) +
                                      "; try a perturbed initial guess");
        }
        double lambda = 1.0;
        Vector trial(x.size());
        Vector ft;
        double rt = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 20; ++halving) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + lambda * dx[i];
            ft = eval(sys, trial, frozen_inputs);
            rt = norm_inf(ft);
            if (std::isfinite(rt) && rt < res) break;
            lambda *= 0.5;
        }
        if (!std::isfinite(rt)) break;
        x = trial;
        f = std::move(ft);
        res = rt;
    }
    if (!(res < options.tol)) {
        throw ConvergenceError("find_equilibrium: no convergence in " + std::to_string(options.max_iter) +
                                   " iterations, residual " + format_double(res),
                               res);
    }
    return x;
}

LinearizationResult small_signal_report(const DynamicalSystem& sys, std::span<const double> frozen_inputs,
                                        Vector guess, const SmallSignalOptions& options) {
    LinearizationResult r;
    r.state_names = sys.state_names;
    r.input_names = sys.input_names;
    r.equilibrium = find_equilibrium(sys, frozen_inputs, std::move(guess), options.equilibrium);
    r.residual = norm_inf(eval(sys, r.equilibrium, frozen_inputs));
    auto j = numerical_jacobian(sys, r.equilibrium, frozen_inputs);
    r.a_matrix = std::move(j.a);
    r.b_matrix = std::move(j.b);
    r.eigenvalues = eigenvalues(r.a_matrix);
    r.stable = std::none_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                            [&](const auto& l) { return l.real() > options.stability_tol; });
    return r;
}

double damping_ratio(std::complex<double> l) noexcept {
    const double mag = std::abs(l);
    return mag == 0.0 ? 0.0 : -l.real() / mag;
}

void write_poles_csv(std::ostream& os, const LinearizationResult& r) {
    os << "re,im,magnitude,damping\n";
    for (const auto& l : r.eigenvalues) {
        os << format_double(l.real()) << ',' << format_double(l.imag()) << ',' << format_double(std::abs(l)) << ','
           << format_double(damping_ratio(l)) << '\n';
    }
}

void write_state_matrix_csv(std::ostream& os, const LinearizationResult& r) {
    for (std::size_t k = 0; k < r.state_names.size(); ++k) os << (k ? "," : "") << r.state_names[k];
    os << '\n';
    for (std::size_t i = 0; i < r.a_matrix.rows(); ++i) {
        for (std::size_t k = 0; k < r.a_matrix.cols(); ++k) os << (k ? "," : "") << format_double(r.a_matrix(i, k));
        os << '\n';
    }
}

double max_eigenvalue_displacement(const std::vector<std::complex<double>>& baseline,
                                   const std::vector<std::complex<double>>& other, double floor) {
    double worst = 0.0;
    for (const auto& l : baseline) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& m : other) nearest = std::min(nearest, std::abs(l - m));
        worst = std::max(worst, nearest / std::max(std::abs(l), floor));
    }
    return worst;
}

} // namespace smoothrl
