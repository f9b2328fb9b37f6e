#pragma once

// Rate-limiter models: the conventional (discontinuous) limiter, the smooth
// second-order limiter, its regulator form, closed-form linearization and
// Lyapunov diagnostics. All functions are pure.

#include <array>

namespace smoothrl {

/// Bounds and gains of a rate limiter. Validated on construction:
/// ydot_max > 0, ydot_min < 0, k1, k2, k3 > 0 (all finite).
class RateLimiterParams {
public:
    RateLimiterParams(double ydot_max, double ydot_min, double k1, double k2, double k3);

    /// Symmetric bounds +-bound.
    static RateLimiterParams symmetric(double bound, double k1, double k2, double k3) {
        return {bound, -bound, k1, k2, k3};
    }

    double ydot_max() const noexcept { return ydot_max_; }
    double ydot_min() const noexcept { return ydot_min_; }
    double k1() const noexcept { return k1_; }
    double k2() const noexcept { return k2_; }
    double k3() const noexcept { return k3_; }

    /// c = -ydot_max * ydot_min, always > 0.
    double c() const noexcept { return -ydot_max_ * ydot_min_; }

    /// Tuning rule of thumb for replicating the conventional limiter: k1 > k2.
    /// Advisory only; never enforced.
    bool follows_tracking_heuristic() const noexcept { return k1_ > k2_; }

    friend bool operator==(const RateLimiterParams&, const RateLimiterParams&) = default;

private:
    double ydot_max_;
    double ydot_min_;
    double k1_;
    double k2_;
    double k3_;
};

/// Output y and internal state x (= dy/dt) of a smooth limiter.
struct RlState {
    double y = 0.0;
    double x = 0.0;
};

struct RlDerivative {
    double dy = 0.0;
    double dx = 0.0;
};

/// Small-signal model over (dy, dx) with input du.
struct RlLinearization {
    std::array<std::array<double, 2>, 2> a_matrix{};
    std::array<double, 2> b_vector{};
};

/// dy = x,
/// dx = (ydot_max - x)(x - ydot_min)[k1 (u - y) - k2 x] - k3 x.
RlDerivative smooth_rl_rhs(RlState state, double u, const RateLimiterParams& p) noexcept;

/// Regulator form: (u - y) replaced by an externally evaluated g(z, y).
/// Drives g to zero at steady state while keeping dy/dt inside the bounds.
RlDerivative regulator_rhs(RlState state, double g_value, const RateLimiterParams& p) noexcept;

/// One step of the conventional limiter in tracking form:
/// y_now = y_prev + h * clamp((u_now - y_prev) / h, ydot_min, ydot_max).
/// Throws InvalidParameters if h <= 0 or is not finite.
double conventional_rl_step(double y_prev, double u_now, double h, const RateLimiterParams& p);

/// Closed-form linearization around (y, x) = (u*, 0):
/// A = [[0, 1], [-k1 c, -(k2 c + k3)]], b = [0, k1 c].
RlLinearization linearize_rl(const RateLimiterParams& p) noexcept;

/// Rate of V = x^2 / 2 in the printed form
///   (ydot_max - x)(ydot_min - x)[k1 (u - y) x - k2 x^2] - k3 x^2.
/// The second factor has the opposite sign of the one obtained by
/// differentiating V along smooth_rl_rhs (see lyapunov_rate_along_flow).
/// Both agree on the bounds, where the value is -k3 * bound^2.
double lyapunov_rate(RlState state, double u, const RateLimiterParams& p) noexcept;

/// x * dx/dt evaluated along smooth_rl_rhs.
double lyapunov_rate_along_flow(RlState state, double u, const RateLimiterParams& p) noexcept;

} // namespace smoothrl
