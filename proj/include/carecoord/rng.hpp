#pragma once

#include <cstdint>
#include <string_view>

namespace carecoord {

// Deterministic xoshiro256++ generator seeded through splitmix64.
// All simulation randomness flows through this type so runs are
// byte-identical across platforms (no std::distribution involved).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t uniform_below(std::uint64_t n);

    double uniform_range(double lo, double hi);

    bool bernoulli(double p);

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal(double mean = 0.0, double stddev = 1.0);

private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// 64-bit FNV-1a over a string; stream-key building block.
std::uint64_t fnv1a64(std::string_view s);

// Derives the seed for one independent stream. Streams are keyed by
// (master seed, subsystem tag, entity key), so the stream a given user
// sees never depends on how many other users exist or in what order
// they are processed.
std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                 std::string_view subsystem,
                                 std::string_view entity_key);

Rng make_stream(std::uint64_t master_seed,
                std::string_view subsystem,
                std::string_view entity_key);

} // namespace carecoord
