#pragma once

#include <cstdint>

namespace banditlab {

/**
 * Deterministic random stream with counter-based derivation.
 *
 * The core generator is splitmix64: the state advances by a fixed odd
 * increment and each output is a bijective scramble of the state, so a
 * stream is a pure function of its seed. Streams for Monte Carlo instances
 * are derived by hashing (master_seed, instance index); instance k therefore
 * sees the same draws no matter which thread runs it or in what order,
 * which is what makes the parallel harness bitwise reproducible.
 */
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

    /// Stream for Monte Carlo instance k under a master seed.
    static RandomStream for_instance(std::uint64_t master_seed, std::uint64_t k) noexcept;

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// True with probability p (p outside [0,1] clamps naturally).
    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Standard normal via the Marsaglia polar method; no cached spare, so
    /// the stream position is a deterministic function of the draws made.
    double normal() noexcept;

    /// Gamma(shape, 1) via the Marsaglia-Tsang squeeze for shape >= 1;
    /// smaller shapes are boosted by U^(1/shape).
    double gamma(double shape) noexcept;

    /// Beta(a, b) as Ga / (Ga + Gb) from two gamma variates.
    double beta(double a, double b) noexcept;

  private:
    std::uint64_t state_;
};

}
