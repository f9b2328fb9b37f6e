#pragma once

// Equilibria, finite-difference Jacobians and small-signal reports for
// continuous systems. Hybrid systems (discrete states) have no Jacobian and
// are refused with UnsupportedRequest.

#include "smoothrl/linalg.hpp"
#include "smoothrl/system.hpp"

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace smoothrl {

struct EquilibriumOptions {
    double tol = 1e-10; // on ||f(x)||_inf
    int max_iter = 50;
};

/// Newton iteration with a central-difference Jacobian and step halving.
/// Throws ConvergenceError (carries the final residual) or
/// SingularMatrixError when the Jacobian cannot be factored.
Vector find_equilibrium(const DynamicalSystem& sys, std::span<const double> frozen_inputs, Vector guess,
                        const EquilibriumOptions& options = {});

struct Jacobians {
    Matrix a; // df/dx, n x n
    Matrix b; // df/du, n x m
};

/// Central differences with per-component step max(1e-7, 1e-7 |v_i|).
/// Throws NumericalError naming the component if a probe is non-finite.
Jacobians numerical_jacobian(const DynamicalSystem& sys, std::span<const double> point,
                             std::span<const double> frozen_inputs);

struct LinearizationResult {
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    Vector equilibrium;
    double residual = 0.0; // ||f(equilibrium)||_inf
    Matrix a_matrix;
    Matrix b_matrix;
    std::vector<std::complex<double>> eigenvalues;
    bool stable = true;
};

struct SmallSignalOptions {
    EquilibriumOptions equilibrium;
    double stability_tol = 1e-9;
};

LinearizationResult small_signal_report(const DynamicalSystem& sys, std::span<const double> frozen_inputs,
                                        Vector guess, const SmallSignalOptions& options = {});

/// -Re(l) / |l|; a zero eigenvalue reports 0.
double damping_ratio(std::complex<double> l) noexcept;

/// Header "re,im,magnitude,damping", one row per eigenvalue.
void write_poles_csv(std::ostream& os, const LinearizationResult& r);
/// Header of state names, one row per state.
void write_state_matrix_csv(std::ostream& os, const LinearizationResult& r);

/// Largest relative movement of a baseline eigenvalue:
/// max over l in baseline of min over m in other of |l - m| / max(|l|, floor).
double max_eigenvalue_displacement(const std::vector<std::complex<double>>& baseline,
                                   const std::vector<std::complex<double>>& other, double floor = 1e-12);

} // namespace smoothrl
