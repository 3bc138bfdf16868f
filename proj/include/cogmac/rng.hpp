#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace cogmac {

// SplitMix64 finalizer; used to decorrelate substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic seed for substream `index` of a master seed. Parallel workers
// each get their own substream so results do not depend on scheduling.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index * 0x9E3779B97F4A7C15ull + 1));
}

// mt19937_64 wrapper with hand-rolled draws. std::*_distribution output is
// implementation-defined; these are bit-stable for a given seed everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1), 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Exponential with the given mean (inverse CDF; uniform() < 1 keeps log finite).
    double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace cogmac
