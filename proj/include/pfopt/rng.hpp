#pragma once

#include <cmath>
#include <cstdint>

namespace pfopt {

namespace detail {

/// SplitMix64 finalizer; used to turn arbitrary integers into well-mixed
/// stream selectors.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Combine up to three integers into one stream selector. Used to give every
/// (phase, iteration, particle) triple its own independent stream.
inline std::uint64_t stream_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = detail::mix64(a);
    h = detail::mix64(h ^ (b + 0x9E3779B97F4A7C15ULL));
    h = detail::mix64(h ^ (c + 0xBF58476D1CE4E5B9ULL));
    return h;
}

/// Counter-based PCG32 stream. The draw sequence is a pure function of
/// (seed, stream_id), so results do not depend on thread count or on how
/// many draws any other stream has made. Distributions are implemented
/// in-class (53-bit uniforms, Box-Muller normals) instead of relying on
/// <random>, whose distribution outputs differ across standard libraries.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        inc_ = (detail::mix64(stream_id) << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += detail::mix64(seed ^ 0xDA3E39CB94B95BDBULL);
        next_u32();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent stream derived from this stream's identity (not its
    /// current state), so derivation commutes with draw order.
    RngStream substream(std::uint64_t key) const {
        return RngStream(seed_, stream_key(stream_id_, key, 0x5851F42D4C957F2DULL));
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    /// Uniform on [0, 1) with full 53-bit mantissa resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller. Consumes exactly two uniforms; no
    /// cached spare, so the stream position stays easy to reason about.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

}  // namespace pfopt
