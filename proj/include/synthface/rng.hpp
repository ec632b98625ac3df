#pragma once

#include <cstdint>

namespace synthface {

// splitmix64 finalizer. Integer-only, identical output on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t key) {
    return mix64(seed ^ (key + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2)));
}

/// Counter-based generator: the stream is a pure function of its key, so
/// sample k of frame f never depends on how many draws preceded it elsewhere.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    CounterRng(std::uint64_t seed, std::uint64_t a) : key_(hash_combine(seed, a)) {}
    CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
        : key_(hash_combine(hash_combine(seed, a), b)) {}
    CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
        : key_(hash_combine(hash_combine(hash_combine(seed, a), b), c)) {}

    std::uint64_t next_u64() { return mix64(key_ + counter_++ * 0x9E3779B97F4A7C15ULL); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace synthface
