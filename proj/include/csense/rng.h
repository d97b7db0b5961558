#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace csense {

/// FNV-1a 64-bit hash; used to turn substream labels and sweep-point names
/// into seed material.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// SplitMix64 finalizer, the standard way to spread seed entropy.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Combines a parent seed with extra material into a new independent seed.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t salt) {
    return splitmix64(parent ^ splitmix64(salt));
}

/// Seedable random source with label-derived substreams.
///
/// The engine is std::mt19937_64, whose output sequence is fully specified
/// by the standard, and all samplers below are written against raw 64-bit
/// draws instead of std::*_distribution (whose output is
/// implementation-defined). Substreams are derived from the root seed and a
/// fixed label, so adding a new sampling site never perturbs the draws of an
/// existing one.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Independent generator for one named purpose.
    Rng substream(std::string_view label) const { return Rng(mix_seed(seed_, fnv1a64(label))); }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [0, 1].  1 - U keeps the log argument in (0, 1].
    double exponential(double rate) { return -std::log(1.0 - next_double()) / rate; }

    /// Standard normal via Box-Muller (single branch, no cached spare).
    double normal() {
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

    /// Lognormal parameterized by mean and coefficient of variation.
    /// mean <= 0 yields 0; cv <= 0 yields the mean exactly (degenerate case
    /// used for deterministic dwell times in tests).
    double lognormal_mean_cv(double mean, double cv) {
        if (mean <= 0.0) return 0.0;
        if (cv <= 0.0) return mean;
        const double sigma2 = std::log(1.0 + cv * cv);
        const double mu = std::log(mean) - 0.5 * sigma2;
        return std::exp(mu + std::sqrt(sigma2) * normal());
    }

    /// Index drawn from a finite distribution by CDF walk.
    /// Probabilities are expected to sum to ~1; any residual mass goes to the
    /// last category.
    std::size_t categorical(std::span<const double> probs) {
        const double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace csense
