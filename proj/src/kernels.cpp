#include "smoothrl/kernels.hpp"

#include "kernels_impl.hpp"
#include "smoothrl/errors.hpp"

#include <initializer_list>
#include <string>

namespace smoothrl {

namespace detail {

void rl_rhs_scalar(BankPointers p, const double* y, const double* x, const double* u, double* dy, double* dx,
                   std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double g = u[i] - y[i];
        dy[i] = xi;
        dx[i] = (p.ydot_max[i] - xi) * (xi - p.ydot_min[i]) * (p.k1[i] * g - p.k2[i] * xi) - p.k3[i] * xi;
    }
}

void lyapunov_scalar(BankPointers p, const double* y, const double* x, const double* u, double* out,
                     std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        out[i] = (p.ydot_max[i] - xi) * (p.ydot_min[i] - xi) * (p.k1[i] * (u[i] - y[i]) * xi - p.k2[i] * xi * xi) -
                 p.k3[i] * xi * xi;
    }
}

} // namespace detail

std::string_view to_string(KernelIsa isa) noexcept {
    switch (isa) {
    case KernelIsa::scalar: return "scalar";
    case KernelIsa::avx2: return "avx2";
    case KernelIsa::neon: return "neon";
    }
    return "unknown";
}

bool isa_available(KernelIsa isa) noexcept {
    switch (isa) {
    case KernelIsa::scalar: return true;
    case KernelIsa::avx2:
#if defined(SMOOTHRL_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case KernelIsa::neon:
#if defined(SMOOTHRL_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

KernelIsa best_isa() noexcept {
    static const KernelIsa isa = [] {
        if (isa_available(KernelIsa::avx2)) return KernelIsa::avx2;
        if (isa_available(KernelIsa::neon)) return KernelIsa::neon;
        return KernelIsa::scalar;
    }();
    return isa;
}

RateLimiterBank::RateLimiterBank(std::span<const RateLimiterParams> params) {
    ydot_max_.reserve(params.size());
    ydot_min_.reserve(params.size());
    k1_.reserve(params.size());
    k2_.reserve(params.size());
    k3_.reserve(params.size());
    for (const auto& p : params) {
        ydot_max_.push_back(p.ydot_max());
        ydot_min_.push_back(p.ydot_min());
        k1_.push_back(p.k1());
        k2_.push_back(p.k2());
        k3_.push_back(p.k3());
    }
}

RateLimiterParams RateLimiterBank::at(std::size_t i) const {
    return {ydot_max_.at(i), ydot_min_.at(i), k1_.at(i), k2_.at(i), k3_.at(i)};
}

namespace {

detail::BankPointers pointers(const RateLimiterBank& b) noexcept {
    return {b.ydot_max().data(), b.ydot_min().data(), b.k1().data(), b.k2().data(), b.k3().data()};
}

void check_lanes(std::size_t n, std::initializer_list<std::size_t> sizes) {
    for (std::size_t s : sizes) {
        if (s != n) throw std::invalid_argument("rate limiter bank: lane count mismatch");
    }
}

void check_isa(KernelIsa isa) {
    if (!isa_available(isa)) {
        throw UnsupportedRequest("kernel ISA '" + std::string(to_string(isa)) + "' is not available on this CPU");
    }
}

} // namespace

void smooth_rl_rhs_batch(const RateLimiterBank& bank, std::span<const double> y, std::span<const double> x,
                         std::span<const double> u, std::span<double> dy, std::span<double> dx, KernelIsa isa) {
    const std::size_t n = bank.size();
    check_lanes(n, {y.size(), x.size(), u.size(), dy.size(), dx.size()});
    check_isa(isa);
    const auto p = pointers(bank);
    switch (isa) {
#if defined(SMOOTHRL_HAVE_AVX2)
    case KernelIsa::avx2: detail::rl_rhs_avx2(p, y.data(), x.data(), u.data(), dy.data(), dx.data(), n); return;
#endif
#if defined(SMOOTHRL_HAVE_NEON)
    case KernelIsa::neon: detail::rl_rhs_neon(p, y.data(), x.data(), u.data(), dy.data(), dx.data(), n); return;
#endif
    default: detail::rl_rhs_scalar(p, y.data(), x.data(), u.data(), dy.data(), dx.data(), n); return;
    }
}

void lyapunov_rate_batch(const RateLimiterBank& bank, std::span<const double> y, std::span<const double> x,
                         std::span<const double> u, std::span<double> out, KernelIsa isa) {
    const std::size_t n = bank.size();
    check_lanes(n, {y.size(), x.size(), u.size(), out.size()});
    check_isa(isa);
    const auto p = pointers(bank);
    switch (isa) {
#if defined(SMOOTHRL_HAVE_AVX2)
    case KernelIsa::avx2: detail::lyapunov_avx2(p, y.data(), x.data(), u.data(), out.data(), n); return;
#endif
#if defined(SMOOTHRL_HAVE_NEON)
    case KernelIsa::neon: detail::lyapunov_neon(p, y.data(), x.data(), u.data(), out.data(), n); return;
#endif
    default: detail::lyapunov_scalar(p, y.data(), x.data(), u.data(), out.data(), n); return;
    }
}

} // namespace smoothrl
