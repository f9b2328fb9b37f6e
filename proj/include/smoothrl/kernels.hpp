#pragma once

// Batched evaluation of many independent smooth rate limiters stored as
// structure-of-arrays. The scalar kernel is the reference; SIMD variants
// follow the same operation order and compile without FMA contraction, so
// results are bit-identical across ISAs.

#include "smoothrl/rate_limiter.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace smoothrl {

enum class KernelIsa { scalar, avx2, neon };

std::string_view to_string(KernelIsa isa) noexcept;

/// True if the kernel was compiled in and the running CPU supports it.
bool isa_available(KernelIsa isa) noexcept;

/// Widest available ISA, resolved once per process.
KernelIsa best_isa() noexcept;

/// Parameters of N limiters, one entry per lane.
class RateLimiterBank {
public:
    RateLimiterBank() = default;
    explicit RateLimiterBank(std::span<const RateLimiterParams> params);

    std::size_t size() const noexcept { return ydot_max_.size(); }
    RateLimiterParams at(std::size_t i) const;

    std::span<const double> ydot_max() const noexcept { return ydot_max_; }
    std::span<const double> ydot_min() const noexcept { return ydot_min_; }
    std::span<const double> k1() const noexcept { return k1_; }
    std::span<const double> k2() const noexcept { return k2_; }
    std::span<const double> k3() const noexcept { return k3_; }

private:
    std::vector<double> ydot_max_, ydot_min_, k1_, k2_, k3_;
};

/// dy[i], dx[i] = smooth_rl_rhs({y[i], x[i]}, u[i], bank.at(i)).
/// All spans must have bank.size() elements.
void smooth_rl_rhs_batch(const RateLimiterBank& bank, std::span<const double> y, std::span<const double> x,
                         std::span<const double> u, std::span<double> dy, std::span<double> dx,
                         KernelIsa isa = best_isa());

/// out[i] = lyapunov_rate({y[i], x[i]}, u[i], bank.at(i)).
void lyapunov_rate_batch(const RateLimiterBank& bank, std::span<const double> y, std::span<const double> x,
                         std::span<const double> u, std::span<double> out, KernelIsa isa = best_isa());

} // namespace smoothrl
