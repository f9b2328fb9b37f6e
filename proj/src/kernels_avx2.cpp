// Compiled with -mavx2 only; callers go through the runtime check in kernels.cpp.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace smoothrl::detail {

void rl_rhs_avx2(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                 std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d g = _mm256_sub_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(y + i));
        const __m256d upper = _mm256_sub_pd(_mm256_loadu_pd(p.ydot_max + i), xi);
        const __m256d lower = _mm256_sub_pd(xi, _mm256_loadu_pd(p.ydot_min + i));
        const __m256d drive = _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(p.k1 + i), g),
                                            _mm256_mul_pd(_mm256_loadu_pd(p.k2 + i), xi));
        const __m256d prod = _mm256_mul_pd(_mm256_mul_pd(upper, lower), drive);
        const __m256d damp = _mm256_mul_pd(_mm256_loadu_pd(p.k3 + i), xi);
        _mm256_storeu_pd(dy + i, xi);
        _mm256_storeu_pd(dx + i, _mm256_sub_pd(prod, damp));
    }
    BankPointers tail{p.ydot_max + i, p.ydot_min + i, p.k1 + i, p.k2 + i, p.k3 + i};
    rl_rhs_scalar(tail, y + i, x + i, u + i, dy + i, dx + i, n - i);
}

void lyapunov_avx2(BankPointers p, const double* y, const double* x, const double* u, double* out,
                   std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d upper = _mm256_sub_pd(_mm256_loadu_pd(p.ydot_max + i), xi);
        const __m256d lower = _mm256_sub_pd(_mm256_loadu_pd(p.ydot_min + i), xi);
        const __m256d g = _mm256_sub_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(y + i));
        const __m256d drive = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(p.k1 + i), g), xi);
        const __m256d damp2 = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(p.k2 + i), xi), xi);
        const __m256d prod = _mm256_mul_pd(_mm256_mul_pd(upper, lower), _mm256_sub_pd(drive, damp2));
        const __m256d damp3 = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(p.k3 + i), xi), xi);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(prod, damp3));
    }
    BankPointers tail{p.ydot_max + i, p.ydot_min + i, p.k1 + i, p.k2 + i, p.k3 + i};
    lyapunov_scalar(tail, y + i, x + i, u + i, out + i, n - i);
}

} // namespace smoothrl::detail
