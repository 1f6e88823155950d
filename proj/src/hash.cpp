#include "twochoice/hash.hpp"

#include <cstring>

namespace twochoice {

std::uint64_t murmur64(std::string_view bytes, std::uint64_t seed) noexcept {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;

  const std::size_t len = bytes.size();
  std::uint64_t h = seed ^ (len * m);

  const char* data = bytes.data();
  const std::size_t blocks = len / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint64_t k;
    std::memcpy(&k, data + i * 8, sizeof k);
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }

  const auto* tail = reinterpret_cast<const unsigned char*>(data + blocks * 8);
  switch (len & 7) {
    case 7: h ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      h ^= std::uint64_t(tail[0]);
      h *= m;
  }

  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HashSeeds derive_seeds(std::uint64_t seed) noexcept {
  std::uint64_t state = seed;
  HashSeeds seeds;
  seeds.first = splitmix64(state);
  seeds.second = splitmix64(state);
  return seeds;
}

BucketPair hash_pair(std::string_view key, const HashSeeds& seeds, std::size_t n) noexcept {
  return BucketPair{reduce_range(murmur64(key, seeds.first), n),
                    reduce_range(murmur64(key, seeds.second), n)};
}

}  // namespace twochoice
