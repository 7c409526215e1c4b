#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace compdist {

/// Seedable random source passed explicitly to every sampler.
///
/// Backed by std::mt19937_64 seeded through std::seed_seq, both of which the
/// standard fixes bit-for-bit, so a (seed, stream) pair names the same sequence
/// on every conforming toolchain. Substreams are derived from the identifiers,
/// never from the current engine state, so they do not depend on how many
/// draws the parent has made.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on the open interval (0, 1).
    double uniform_open();
    /// Standard normal (Marsaglia polar method).
    double normal();

    RngStream substream(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace compdist
