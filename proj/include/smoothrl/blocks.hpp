#pragma once

// Library blocks used to assemble the case studies.

#include "smoothrl/linalg.hpp"
#include "smoothrl/rate_limiter.hpp"
#include "smoothrl/system.hpp"

#include <string>
#include <vector>

namespace smoothrl::blocks {

/// Smooth limiter. States (y, x); input u; outputs y, ydot (= x).
DynamicalSystem smooth_rate_limiter(std::string name, const RateLimiterParams& p);

/// Regulator form. States (y, x); input g (value of the regulated function); outputs y, ydot.
DynamicalSystem smooth_regulator(std::string name, const RateLimiterParams& p);

/// Conventional limiter on the control grid. Discrete states (y, rate);
/// input u; outputs y, ydot (both held between updates).
DynamicalSystem conventional_rate_limiter(std::string name, const RateLimiterParams& p);

/// n smooth limiters evaluated with the batched kernel.
/// States [y1..yn, x1..xn]; inputs u1..un; outputs y1..yn, ydot1..ydotn.
DynamicalSystem smooth_rate_limiter_bank(std::string name, const std::vector<RateLimiterParams>& params);

struct PlantRL {
    double l = 1e-3; // H, > 0
    double r = 0.1;  // ohm, >= 0
};

/// l di/dt = -r i + v. State i; input v; output i.
DynamicalSystem rl_plant(std::string name, PlantRL plant);

struct PiController {
    double kp = 0.0;
    double ki = 0.0; // >= 0
};

/// v = kp e + ki * integral(e). State integral; input e; output v (feedthrough).
DynamicalSystem pi_controller(std::string name, PiController pi);

/// y = sum(signs[k] * in_k). Inputs in1..inN; output y (feedthrough).
DynamicalSystem summation(std::string name, std::vector<double> signs);

DynamicalSystem gain(std::string name, double k);

/// dy/dt = u. State y; input u; output y.
DynamicalSystem integrator(std::string name);

struct SwingMachine {
    double inertia_h = 4.0; // s, > 0
    double damping = 1.0;   // pu
    double load = 0.0;      // pu, constant local demand
};

/// Lossless network of classical machines.
/// States: theta2..thetaN (rotor angle relative to machine 1, rad), omega1..omegaN (pu speed deviation).
/// Inputs tm1..tmN (mechanical torque, pu). Outputs omega1..omegaN, pe1..peN.
///   dtheta_i/dt = omega_s (omega_i - omega_1)
///   2 H_i domega_i/dt = tm_i - load_i - pe_i - D_i omega_i,  pe_i = sum_j B_ij sin(delta_i - delta_j)
/// Throws InvalidParameters for H <= 0 or a non-symmetric susceptance matrix.
DynamicalSystem swing_network(std::string name, std::vector<SwingMachine> machines, Matrix susceptance,
                              double omega_s);

/// Electrical power injections pe_i for relative angles theta (size n-1).
Vector network_power(const Matrix& susceptance, std::span<const double> theta);

struct Governor {
    double time_constant = 0.5; // s
    double droop = 0.05;        // pu
};

/// T dtau/dt = p_order - omega / R - tau. State tau; inputs omega, p_order; output tau.
DynamicalSystem governor(std::string name, Governor gov);

} // namespace smoothrl::blocks
