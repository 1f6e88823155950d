#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace twochoice {

// The two candidate buckets of a key. first == second is a self-loop.
struct BucketPair {
  std::size_t first = 0;
  std::size_t second = 0;

  // Bucket a record stored in `here` would move to.
  std::size_t alternate(std::size_t here) const noexcept {
    return here == first ? second : first;
  }
  bool is_self_loop() const noexcept { return first == second; }

  friend auto operator<=>(const BucketPair&, const BucketPair&) = default;
};

struct HashSeeds {
  std::uint64_t first = 0;
  std::uint64_t second = 0;

  friend bool operator==(const HashSeeds&, const HashSeeds&) = default;
};

// MurmurHash64A over the key bytes.
std::uint64_t murmur64(std::string_view bytes, std::uint64_t seed) noexcept;

// SplitMix64 step, used to derive seeds from a single experiment seed.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

HashSeeds derive_seeds(std::uint64_t seed) noexcept;

__extension__ typedef unsigned __int128 uint128;

// Maps a 64-bit hash onto [0, n) by multiply-shift.
inline std::size_t reduce_range(std::uint64_t h, std::size_t n) noexcept {
  return static_cast<std::size_t>((static_cast<uint128>(h) * static_cast<uint128>(n)) >> 64);
}

// Both indices are computed from independently seeded hashes of the key.
// Requires n >= 1.
BucketPair hash_pair(std::string_view key, const HashSeeds& seeds, std::size_t n) noexcept;

}  // namespace twochoice
