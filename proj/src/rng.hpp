#pragma once

#include <array>
#include <cstdint>

namespace jumpwass {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// One 128-bit counter block in, four 32-bit words out.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

// RNG stream ids within a path; streams are statistically independent.
enum class RngStream : uint32_t {
    Brownian = 0,
    JumpCount = 1,
    JumpMark = 2,
    JumpThin = 3,
    Inner = 4,
};

// Deterministic per-path stream keyed by (seed, path_index, stream).
// Draw order within a stream is the only state; paths and streams never
// collide for path_index < 2^40 and stream < 2^24.
class PathRng {
public:
    PathRng(uint64_t seed, uint64_t path_index, RngStream stream);

    uint64_t next_u64();
    // Uniform on (0, 1].
    double uniform();
    // Standard normal (Box-Muller, pairs cached).
    double normal();
    // Poisson(mean); exact for any mean via additivity chunking.
    uint64_t poisson(double mean);

private:
    void refill();

    std::array<uint32_t, 2> key_;
    uint32_t path_lo_, path_hi_stream_;
    uint64_t draw_ = 0;
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 2;  // in units of u64; 2 == empty
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace jumpwass
