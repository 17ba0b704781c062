#include "memepred/rng.hpp"
#include "memepred/errors.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

namespace memepred {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::atomic<bool> g_warnings_enabled{true};

} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(root ^ splitmix64(h));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) ^ (index * 0xd1342543de82ef95ULL + 1));
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Lemire-style rejection to avoid modulo bias.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

double Rng::exponential(double mean) {
    return -mean * std::log1p(-uniform());
}

void warn(const std::string& message) {
    if (g_warnings_enabled.load(std::memory_order_relaxed)) {
        std::cerr << "warning: " << message << '\n';
    }
}

void set_warnings_enabled(bool enabled) {
    g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

} // namespace memepred
