#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pwlab {

/// 128-bit hash value. `high` is the first output lane (h1), `low` the
/// second (h2); hex() renders h1 then h2, 32 lowercase hex chars.
struct Hash128 {
    std::uint64_t high = 0;
    std::uint64_t low = 0;

    std::string hex() const;
    friend bool operator==(const Hash128&, const Hash128&) = default;
    friend auto operator<=>(const Hash128&, const Hash128&) = default;
};

/// MurmurHash3, x64 128-bit variant. Both lanes start from the full 64-bit
/// seed, which is bit-identical to the canonical algorithm for seeds that
/// fit in 32 bits.
Hash128 murmur3_x64_128(std::span<const std::uint8_t> data, std::uint64_t seed);
Hash128 murmur3_x64_128(std::string_view data, std::uint64_t seed);

}  // namespace pwlab
