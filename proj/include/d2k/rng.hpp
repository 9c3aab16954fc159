#pragma once

#include <cstdint>

namespace d2k {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// splitmix64: tiny, seedable, and cheap to fork into substreams. Part of
// the bit-exact output contract, so the algorithm must never change.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // uniform double in [0, 1) with 53 random bits
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Stream seed for (master seed, cell, replicate): chained mixing keeps the
// substreams order-independent, so parallel replicate schedules cannot
// change any result.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t cell,
                                    std::uint64_t replicate) {
    return mix64(mix64(mix64(seed) ^ cell) ^ replicate);
}

}  // namespace d2k
