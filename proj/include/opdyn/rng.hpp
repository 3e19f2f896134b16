#pragma once

#include <array>
#include <cstdint>

namespace opdyn {

/// Seeded, reproducible random stream: xoshiro256++ seeded through
/// splitmix64, with replicate streams separated by the generator's
/// documented jump function. Each jump advances the state by 2^128 steps,
/// so distinct stream ids own non-overlapping subsequences of length 2^128
/// and identical (seed, stream_id) pairs replay bit-for-bit.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t next_u64();

    /// Uniform integer in [0, bound) by unbiased rejection from the top of
    /// the 64-bit range (bound must be nonzero).
    std::uint64_t next_below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void jump();
    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

}  // namespace opdyn
