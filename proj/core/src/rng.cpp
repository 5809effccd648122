#include "cbi/rng.hpp"

#include <cmath>

namespace cbi::rng {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 2> key,
                                           std::array<std::uint32_t, 4> ctr) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWey0 = 0x9E3779B9u;
    constexpr std::uint32_t kWey1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWey0;
        key[1] += kWey1;
    }
    return ctr;
}

Stream::Stream(std::uint64_t seed, Domain domain, std::uint64_t stream) {
    const std::uint64_t k =
        mix64(mix64(mix64(seed) + static_cast<std::uint64_t>(domain)) + stream);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    set_block(0);
}

void Stream::set_block(std::uint64_t block) {
    block_ = block;
    pos_ = 0;
    avail_ = 0;
    have_spare_ = false;
}

std::array<std::uint32_t, 4> Stream::raw_block() const {
    return philox4x32_10(key_, {static_cast<std::uint32_t>(pos_),
                                static_cast<std::uint32_t>(pos_ >> 32),
                                static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32)});
}

void Stream::refill() {
    const auto w = raw_block();
    ++pos_;
    buf_[0] = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
    buf_[1] = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
    avail_ = 2;
}

std::uint64_t Stream::next_u64() {
    if (avail_ == 0) refill();
    return buf_[2 - avail_--];
}

double Stream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

long Stream::poisson(double mean) {
    long total = 0;
    // Knuth inversion is exact but needs exp(-mean) > 0; split large means.
    constexpr double kChunk = 16.0;
    while (mean > kChunk) {
        total += poisson(kChunk);
        mean -= kChunk;
    }
    if (mean <= 0.0) return total;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    long k = 0;
    do {
        ++k;
        prod *= uniform();
    } while (prod > limit);
    return total + k - 1;
}

}  // namespace cbi::rng
