// AArch64 Advanced SIMD variant, two lanes per vector.

#include "kernels_impl.hpp"

#include <arm_neon.h>

namespace smoothrl::detail {

void rl_rhs_neon(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                 std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t xi = vld1q_f64(x + i);
        const float64x2_t g = vsubq_f64(vld1q_f64(u + i), vld1q_f64(y + i));
        const float64x2_t upper = vsubq_f64(vld1q_f64(p.ydot_max + i), xi);
        const float64x2_t lower = vsubq_f64(xi, vld1q_f64(p.ydot_min + i));
        const float64x2_t drive = vsubq_f64(vmulq_f64(vld1q_f64(p.k1 + i), g), vmulq_f64(vld1q_f64(p.k2 + i), xi));
        const float64x2_t prod = vmulq_f64(vmulq_f64(upper, lower), drive);
        vst1q_f64(dy + i, xi);
        vst1q_f64(dx + i, vsubq_f64(prod, vmulq_f64(vld1q_f64(p.k3 + i), xi)));
    }
    BankPointers tail{p.ydot_max + i, p.ydot_min + i, p.k1 + i, p.k2 + i, p.k3 + i};
    rl_rhs_scalar(tail, y + i, x + i, u + i, dy + i, dx + i, n - i);
}

void lyapunov_neon(BankPointers p, const double* y, const double* x, const double* u, double* out,
                   std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t xi = vld1q_f64(x + i);
        const float64x2_t upper = vsubq_f64(vld1q_f64(p.ydot_max + i), xi);
        const float64x2_t lower = vsubq_f64(vld1q_f64(p.ydot_min + i), xi);
        const float64x2_t g = vsubq_f64(vld1q_f64(u + i), vld1q_f64(y + i));
        const float64x2_t drive = vmulq_f64(vmulq_f64(vld1q_f64(p.k1 + i), g), xi);
        const float64x2_t damp2 = vmulq_f64(vmulq_f64(vld1q_f64(p.k2 + i), xi), xi);
        const float64x2_t prod = vmulq_f64(vmulq_f64(upper, lower), vsubq_f64(drive, damp2));
        const float64x2_t damp3 = vmulq_f64(vmulq_f64(vld1q_f64(p.k3 + i), xi), xi);
        vst1q_f64(out + i, vsubq_f64(prod, damp3));
    }
    BankPointers tail{p.ydot_max + i, p.ydot_min + i, p.k1 + i, p.k2 + i, p.k3 + i};
    lyapunov_scalar(tail, y + i, x + i, u + i, out + i, n - i);
}

} // namespace smoothrl::detail
