#include "rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jumpwass {

namespace {

constexpr uint32_t kW32A = 0x9E3779B9u;
constexpr uint32_t kW32B = 0xBB67AE85u;
constexpr uint32_t kM4x32A = 0xD2511F53u;
constexpr uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    lo = static_cast<uint32_t>(p);
    hi = static_cast<uint32_t>(p >> 32);
}

inline void one_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
    uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kM4x32A, c[0], lo0, hi0);
    mul_hi_lo(kM4x32B, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key) {
    std::array<uint32_t, 4> c = counter;
    std::array<uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kW32A;
            k[1] += kW32B;
        }
        one_round(c, k);
    }
    return c;
}

PathRng::PathRng(uint64_t seed, uint64_t path_index, RngStream stream) {
    key_ = {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
    path_lo_ = static_cast<uint32_t>(path_index);
    path_hi_stream_ =
        static_cast<uint32_t>(path_index >> 32) | (static_cast<uint32_t>(stream) << 8);
}

void PathRng::refill() {
    buf_ = philox4x32({static_cast<uint32_t>(draw_), static_cast<uint32_t>(draw_ >> 32),
                       path_lo_, path_hi_stream_},
                      key_);
    ++draw_;
    buf_pos_ = 0;
}

uint64_t PathRng::next_u64() {
    if (buf_pos_ >= 2) refill();
    const int i = 2 * buf_pos_++;
    return static_cast<uint64_t>(buf_[i]) | (static_cast<uint64_t>(buf_[i + 1]) << 32);
}

double PathRng::uniform() {
    // (0, 1]: 53 mantissa bits, never exactly 0 so log() stays finite.
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double PathRng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
}

uint64_t PathRng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    uint64_t total = 0;
    // Knuth's product method underflows for large means; split by additivity.
    while (mean > 30.0) {
        total += poisson(30.0);
        mean -= 30.0;
    }
    const double limit = std::exp(-mean);
    uint64_t k = 0;
    double prod = 1.0;
    do {
        ++k;
        prod *= uniform();
    } while (prod > limit);
    return total + k - 1;
}

}  // namespace jumpwass
