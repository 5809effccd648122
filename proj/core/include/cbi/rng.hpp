#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace cbi::rng {

/// Domain tags keep independent samplers on disjoint key spaces even when
/// they share (seed, stream).
enum class Domain : std::uint64_t {
    ExactImmigration = 1,
    Euler = 2,
    LimitY = 3,
    LimitJoint = 4,
    Generic = 5,
};

/// Counter-based stream built on the Philox4x32-10 block cipher.
///
/// A stream is keyed by (seed, domain, stream index); draws inside the stream
/// are addressed by a 128-bit counter split into a block index (set
/// explicitly, e.g. one block per Euler substep) and a position that advances
/// as values are consumed. Identical keys and blocks reproduce identical
/// draws on any platform or thread schedule.
class Stream {
public:
    Stream(std::uint64_t seed, Domain domain, std::uint64_t stream);

    /// Jump to a block and reset the in-block position and cached state.
    void set_block(std::uint64_t block);

    std::uint64_t next_u64();

    /// Uniform on (0,1); never returns an endpoint.
    double uniform();

    /// Standard normal via Box-Muller (pairs cached within a block).
    double normal();

    /// Poisson draw by inversion, chunked so that any finite mean is exact
    /// in distribution.
    long poisson(double mean);

private:
    std::array<std::uint32_t, 4> raw_block() const;
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t block_ = 0;
    std::uint64_t pos_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int avail_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer used to derive Philox keys from user seeds.
std::uint64_t mix64(std::uint64_t x);

/// The raw 10-round Philox4x32 block function (exposed for known-answer
/// tests against the published vectors).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 2> key,
                                           std::array<std::uint32_t, 4> ctr);

}  // namespace cbi::rng
