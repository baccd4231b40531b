#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace confres::rng {

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (seed, stream, position), so per-trial substreams derived from the trial
/// index produce identical results whether trials run sequentially or in
/// parallel.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            buffer_ = block(seed_, {std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                                    std::uint32_t(stream_), std::uint32_t(stream_ >> 32)});
            ++counter_;
            have_ = 4;
        }
        return buffer_[4 - have_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_u01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_u01_open() { return 1.0 - next_u01(); }

    static std::array<std::uint32_t, 4> block(std::uint64_t key64,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = std::uint32_t(key64);
        std::uint32_t k1 = std::uint32_t(key64 >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
            std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ k0, std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ k1, std::uint32_t(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int have_ = 0;
};

/// splitmix64 finalizer; used to fold ids into substream numbers.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix(a ^ mix(b)); }

/// FNV-1a, for deriving substreams from string identifiers.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace confres::rng
