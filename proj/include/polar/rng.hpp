// Counter-based random streams: any draw is a pure function of
// (master seed, stream id, index), so parallel simulation schedules
// reproduce bit-identically regardless of worker interleaving.
#pragma once

#include <cmath>
#include <cstdint>

namespace polar {

namespace detail {
// splitmix64 finalizer; full-avalanche 64->64 mix.
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
  public:
    RngStream(uint64_t master_seed, uint64_t stream_id)
        : key_(detail::mix64(master_seed ^ detail::mix64(stream_id))) {}

    // i-th raw 64-bit word of the stream; stateless in i.
    uint64_t word(uint64_t i) const {
        return detail::mix64(key_ + (i + 1) * 0x9E3779B97F4A7C15ull);
    }

    uint64_t next() { return word(counter_++); }

    // Uniform in (0, 1]: never zero, so safe under log().
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    uint8_t next_bit() { return static_cast<uint8_t>(next() >> 63); }

    // Standard normal via Box-Muller; second value cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream ids for a frame-indexed simulation. Distinct purposes get
// disjoint streams so adding a consumer never shifts another one.
enum class StreamPurpose : uint64_t { message = 1, noise = 2, erasure = 3 };

inline uint64_t frame_stream_id(uint64_t frame, StreamPurpose p) {
    return frame * 8ull + static_cast<uint64_t>(p);
}

}  // namespace polar
