#pragma once

#include <cstdint>

namespace qrob {

/// Seeded, splittable pseudo-random stream (xoshiro256** core, splitmix64
/// initialisation). A given (seed, stream_id) pair produces the same
/// sequence on every platform and under any call interleaving, which is what
/// makes Monte-Carlo replications reproducible: each replication owns its own
/// stream instead of sharing one.
///
/// Instances are single-owner; do not share a stream across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : seed_(seed), stream_id_(stream_id) {
        // splitmix64 over (seed, stream_id) fills the 256-bit state; the
        // stream id is folded in with an odd constant so that streams with
        // nearby ids do not start from nearby states.
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        for (auto& s : state_) s = splitmix64(x);
        // xoshiro must not start from the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in the open interval (0, 1). 53-bit resolution; never
    /// returns an endpoint, so quantile transforms stay finite.
    double next_uniform01() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform draw on (lo, hi).
    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_uniform01();
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
};

} // namespace qrob
