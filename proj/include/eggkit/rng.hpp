#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace eggkit {

// Seeded random stream with explicit sub-stream derivation.
//
// A fixed seed reproduces the same draw sequence on every run. Chains,
// bootstrap loops and simulation replicates each own their stream;
// substream(i) derives an unrelated stream for worker i, so replicates
// stay reproducible regardless of scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed)
        : seed_(seed), engine_(make_engine(seed)) {}

    // Derived stream; distinct indices give unrelated sequences.
    RngStream substream(std::uint64_t index) const {
        return RngStream(derive_seed(seed_, index));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1).
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        return hash64(hash64(seed) ^ (0xD1B54A32D192ED03ull * (index + 1)));
    }

private:
    static std::uint64_t hash64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::mt19937_64 make_engine(std::uint64_t seed) {
        const std::uint64_t h1 = hash64(seed);
        const std::uint64_t h2 = hash64(h1 ^ 0xA0761D6478BD642Full);
        std::seed_seq seq{static_cast<std::uint32_t>(h1),
                          static_cast<std::uint32_t>(h1 >> 32),
                          static_cast<std::uint32_t>(h2),
                          static_cast<std::uint32_t>(h2 >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace eggkit
