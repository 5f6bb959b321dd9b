#include "banditlab/rng.hpp"

#include <cmath>

namespace banditlab {

namespace {
// splitmix64 output scramble used as a 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}

RandomStream RandomStream::for_instance(std::uint64_t master_seed, std::uint64_t k) noexcept {
    // Two mixing rounds keep nearby (seed, k) pairs statistically unrelated.
    return RandomStream(mix64(master_seed + 0x9E3779B97F4A7C15ull * (k + 1)));
}

double RandomStream::normal() noexcept {
    for (;;) {
        const double u = 2.0 * uniform01() - 1.0;
        const double v = 2.0 * uniform01() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double RandomStream::gamma(double shape) noexcept {
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
        double u = uniform01();
        while (u == 0.0) u = uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RandomStream::beta(double a, double b) noexcept {
    const double ga = gamma(a);
    const double gb = gamma(b);
    const double sum = ga + gb;
    return sum > 0.0 ? ga / sum : 0.5;  // sum == 0 has probability zero
}

}
