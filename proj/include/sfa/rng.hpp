#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace sfa {

// PCG32 (Melissa O'Neill's pcg32 variant). Used instead of the std engines
// because its output is identical on every platform and standard library,
// and independent substreams are cheap: (seed, stream) fully determines the
// byte stream. All seeded behavior in this project flows through this class.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform in [0, n) via rejection.
    std::uint32_t bounded(std::uint32_t n) {
        if (n < 2) return 0;
        std::uint32_t threshold = (-n) % n;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Standard normal via Box-Muller. One variate per call; no cached spare,
    // so the draw count per call is fixed.
    double normal() {
        double u1 = 1.0 - next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// FNV-1a, 64-bit. Content fingerprints only (prompt hashes, plan digests,
// substream derivation) -- not a cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view s);

}  // namespace sfa
