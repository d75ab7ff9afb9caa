#pragma once

#include <cstdint>
#include <random>

namespace pansde {

/// Standard-normal quantile function (Wichura's algorithm AS 241, double
/// precision variant). Deterministic across platforms, unlike
/// std::normal_distribution.
double inverse_normal_cdf(double p);

/// Deterministic random stream for one (seed, stream) pair.
///
/// Distinct stream ids derive practically independent sequences from one
/// master seed, so Monte Carlo paths can be assigned to workers in any order
/// without changing the numbers. Normal variates go through the inverse CDF
/// so the byte stream is reproducible across standard library
/// implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw strictly inside (0, 1).
    double uniform01();

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw.
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace pansde
