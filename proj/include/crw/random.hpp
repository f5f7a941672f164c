#pragma once

#include <bit>
#include <cstdint>

namespace crw {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream for one trial. Depends only on the pair,
/// so trials can run in any order on any thread.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based SplitMix64 stream with a bit buffer so that an SSRW step in
/// d=1 costs one bit and in d=2 two bits.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : counter_(seed) {}

    static RandomSource for_trial(std::uint64_t master, std::uint64_t trial) {
        return RandomSource(derive_seed(master, trial));
    }

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(counter_);
    }

    bool next_bit() {
        if (bits_left_ == 0) {
            buffer_ = next_u64();
            bits_left_ = 64;
        }
        const bool b = buffer_ & 1U;
        buffer_ >>= 1;
        --bits_left_;
        return b;
    }

    /// Sum of `count` independent +-1 signs. Consumes exactly the bits that
    /// `count` calls of next_bit() would, in the same order.
    std::int64_t sign_sum(std::int64_t count) {
        std::int64_t ones = 0;
        std::int64_t left = count;
        while (left > 0) {
            if (bits_left_ == 0) {
                buffer_ = next_u64();
                bits_left_ = 64;
            }
            const int take = left < bits_left_ ? static_cast<int>(left) : bits_left_;
            const std::uint64_t mask = take == 64 ? ~0ULL : ((1ULL << take) - 1);
            ones += std::popcount(buffer_ & mask);
            buffer_ = take == 64 ? 0 : buffer_ >> take;
            bits_left_ -= take;
            left -= take;
        }
        return 2 * ones - count;
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t counter_;
    std::uint64_t buffer_ = 0;
    int bits_left_ = 0;
};

}  // namespace crw
