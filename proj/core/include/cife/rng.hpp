#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace cife::rng {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results do not depend on call interleaving,
// batching, or thread count.

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t draw_bits(uint64_t seed, uint64_t stream, uint64_t counter) {
    uint64_t key = mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ull));
    return mix64(key + counter * 0x9e3779b97f4a7c15ull);
}

inline double uniform(uint64_t seed, uint64_t stream, uint64_t counter) {
    return static_cast<double>(draw_bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Box-Muller; consumes counters 2c and 2c+1 of the stream.
inline double gaussian(uint64_t seed, uint64_t stream, uint64_t counter) {
    double u1 = uniform(seed, stream, 2 * counter);
    double u2 = uniform(seed, stream, 2 * counter + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Stream id layout: high 32 bits name the purpose, low 32 bits a sub index
// (epoch, step, sample slot, ...).
enum Purpose : uint32_t {
    kInitVae = 1,
    kInitText = 2,
    kInitUnet = 3,
    kInitEncoder = 4,
    kInitMixer = 5,
    kInitAeDecoder = 6,
    kShuffle = 10,
    kTimestepDraw = 11,
    kNoiseDraw = 12,
    kVaeReparam = 13,
    kSampleInit = 20,
    kSampleEta = 21,
    kDatasetIdentity = 30,
    kDatasetVariation = 31,
    kEvalHoldout = 40,
    kGradCheck = 50,
};

inline uint64_t make_stream(uint32_t purpose, uint64_t sub = 0) {
    return (static_cast<uint64_t>(purpose) << 32) ^ (sub & 0xffffffffull);
}

// Stateful convenience wrapper over the stateless draws.
struct Stream {
    uint64_t seed = 0;
    uint64_t stream = 0;
    uint64_t counter = 0;

    Stream(uint64_t seed_, uint64_t stream_) : seed(seed_), stream(stream_) {}

    uint64_t next_bits() { return draw_bits(seed, stream, counter++); }
    double next_uniform() { return uniform(seed, stream, counter++); }
    double next_gaussian() { return gaussian(seed, stream, counter++); }
    // Uniform integer in [0, n).
    uint64_t next_index(uint64_t n) { return next_bits() % n; }

    template <class T>
    void fill_gaussian(std::span<T> out, double scale = 1.0) {
        for (auto& v : out) v = static_cast<T>(next_gaussian() * scale);
    }
    template <class T>
    void fill_uniform(std::span<T> out, double lo, double hi) {
        for (auto& v : out) v = static_cast<T>(lo + (hi - lo) * next_uniform());
    }
};

}  // namespace cife::rng
