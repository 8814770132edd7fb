#pragma once

#include <cstdint>
#include <string_view>

namespace fvirp {

// PCG32: deterministic across platforms, cheap to seed per substream.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream = 0) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((0u - rot) & 31u));
    }

    // Uniform in [0, 1).
    double next_double() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1, 1).
    double next_symmetric() { return 2.0 * next_double() - 1.0; }

    bool next_bool() { return (next_u32() & 1u) != 0u; }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

// FNV-1a hash of a purpose label; used to derive independent substreams
// from one run seed.
inline std::uint64_t stream_id(std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : label) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    return h;
}

inline Pcg32 substream(std::uint64_t seed, std::string_view label) {
    return Pcg32(seed, stream_id(label));
}

} // namespace fvirp
