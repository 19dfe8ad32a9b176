#pragma once

#include <cstdint>

namespace srblab {

// Counter-based splittable generator. Every draw is a pure hash of
// (seed, stream, counter), so per-particle streams are independent of
// scheduling order and runs are bitwise reproducible for a fixed seed.
namespace rng_detail {
inline std::uint64_t mix64(std::uint64_t z) {
    // Stafford mix 13 finalizer.
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace rng_detail

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : base_(rng_detail::mix64(seed * 0x9e3779b97f4a7c15ULL ^
                                  rng_detail::mix64(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() {
        return rng_detail::mix64(base_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace srblab
