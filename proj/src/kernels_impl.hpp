#pragma once

#include <cstddef>

namespace smoothrl::detail {

struct BankPointers {
    const double* ydot_max;
    const double* ydot_min;
    const double* k1;
    const double* k2;
    const double* k3;
};

// Each kernel processes lanes [0, n); vector variants handle their own tail.

void rl_rhs_scalar(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                   std::size_t n) noexcept;
void lyapunov_scalar(BankPointers p, const double* y, const double* x, const double* u, double* out,
                     std::size_t n) noexcept;

#if defined(SMOOTHRL_HAVE_AVX2)
void rl_rhs_avx2(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                 std::size_t n) noexcept;
void lyapunov_avx2(BankPointers p, const double* y, const double* x, const double* u, double* out,
                   std::size_t n) noexcept;
#endif

#if defined(SMOOTHRL_HAVE_NEON)
void rl_rhs_neon(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                 std::size_t n) noexcept;
void lyapunov_neon(BankPointers p, const double* y, const double* x, const double* u, double* out,
                   std::size_t n) noexcept;
#endif

} // namespace smoothrl::detail
