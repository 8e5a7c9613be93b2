#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace social_learning {

// Independent random streams are addressed by (seed, kind, index, time).
// Every draw in a simulation comes from a stream built on demand from its
// address, so a run is reproducible from the master seed alone and no
// generator state is ever shared between agents, rounds or threads.
enum class StreamKind : std::uint64_t {
    Observation = 1,
    Trend = 2,
    Branch = 3,
    MatrixFactor = 4,
    Run = 5,
    Check = 6,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamKind kind, std::uint64_t index,
                                    std::uint64_t time) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(kind));
    h = mix64(h ^ index);
    h = mix64(h ^ time);
    return h;
}

// Engine output is bit-exact across standard libraries; the distribution
// transforms below are written out so draws are too.
class Stream {
   public:
    explicit Stream(std::uint64_t key) : engine_(key) {}
    Stream(std::uint64_t seed, StreamKind kind, std::uint64_t index, std::uint64_t time)
        : engine_(derive_seed(seed, kind, index, time)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second variate is discarded.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace social_learning
