#include "smoothrl/rate_limiter.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smoothrl {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameters("rate limiter: " + what);
}

} // namespace

RateLimiterParams::RateLimiterParams(double ydot_max, double ydot_min, double k1, double k2, double k3)
    : ydot_max_(ydot_max), ydot_min_(ydot_min), k1_(k1), k2_(k2), k3_(k3) {
    require(std::isfinite(ydot_max) && ydot_max > 0.0, "ydot_max must be > 0");
    require(std::isfinite(ydot_min) && ydot_min < 0.0, "ydot_min must be < 0");
    require(std::isfinite(k1) && k1 > 0.0, "k1 must be > 0");
    require(std::isfinite(k2) && k2 > 0.0, "k2 must be > 0");
    require(std::isfinite(k3) && k3 > 0.0, "k3 must be > 0");
}

RlDerivative smooth_rl_rhs(RlState s, double u, const RateLimiterParams& p) noexcept {
    return regulator_rhs(s, u - s.y, p);
}

RlDerivative regulator_rhs(RlState s, double g_value, const RateLimiterParams& p) noexcept {
    const double x = s.x;
    // Operation order is mirrored by the batched kernels; keep them in sync.
    const double dx = (p.ydot_max() - x) * (x - p.ydot_min()) * (p.k1() * g_value - p.k2() * x) - p.k3() * x;
    return {x, dx};
}

double conventional_rl_step(double y_prev, double u_now, double h, const RateLimiterParams& p) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidParameters("conventional_rl_step: step h must be positive and finite");
    }
    const double rate = std::clamp((u_now - y_prev) / h, p.ydot_min(), p.ydot_max());
    return y_prev + h * rate;
}

RlLinearization linearize_rl(const RateLimiterParams& p) noexcept {
    const double c = p.c();
    RlLinearization lin;
    lin.a_matrix = {{{0.0, 1.0}, {-p.k1() * c, -(p.k2() * c + p.k3())}}};
    lin.b_vector = {0.0, p.k1() * c};
    return lin;
}

double lyapunov_rate(RlState s, double u, const RateLimiterParams& p) noexcept {
    const double x = s.x;
    return (p.ydot_max() - x) * (p.ydot_min() - x) * (p.k1() * (u - s.y) * x - p.k2() * x * x) - p.k3() * x * x;
}

double lyapunov_rate_along_flow(RlState s, double u, const RateLimiterParams& p) noexcept {
    return s.x * smooth_rl_rhs(s, u, p).dx;
}

} // namespace smoothrl
