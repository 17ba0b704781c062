#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace memepred {

// Labeled seed derivation so that independent consumers of a root seed
// (simulation, folds, forests) never share a stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

// mt19937_64 plus distribution helpers whose output does not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double mean);

private:
    std::mt19937_64 engine_;
};

} // namespace memepred
