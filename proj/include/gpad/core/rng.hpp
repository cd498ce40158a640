#pragma once

// Counter-based deterministic RNG.
//
// Draw i of a stream with seed s is mix64(s + (i+1)*GAMMA) where mix64 is the
// SplitMix64 finalizer and GAMMA its standard increment. Output depends only
// on (seed, counter), so sequences are reproducible across runs and platforms
// and independent of evaluation order. Substreams are derived by hashing a
// stream id into the seed, giving disjoint, individually reproducible
// sequences for data generation, augmentation and noise sampling.

#include <cstdint>
#include <stdexcept>

namespace gpad {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    RngStream substream(std::uint64_t id) const {
        return RngStream(mix64(seed_ ^ mix64(id + kGamma)));
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(seed_ + counter_ * kGamma);
    }

    // Uniform in [0,1) with 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), rejection sampled.
    std::int64_t uniform_int(std::int64_t n) {
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<std::int64_t>(x % un);
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal();

    // Serializable state.
    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }
    bool has_cached() const { return has_cached_; }
    double cached() const { return cached_; }
    void restore(std::uint64_t counter, bool has_cached, double cached) {
        counter_ = counter;
        has_cached_ = has_cached;
        cached_ = cached;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace gpad
