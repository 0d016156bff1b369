#pragma once

#include <cstdint>

namespace chsk {

// Deterministic source of (bucket, sign) pairs for the sparse signed
// projection. Every draw is a pure function of (seed, coordinate,
// repetition, bucket count): no state, no caching, and the recipe below is
// normative so that sketch files stay bit-identical across platforms.

struct Draw {
  std::uint32_t bucket;  // in [0, buckets)
  std::int32_t sign;     // exactly -1 or +1
};

// SplitMix64 finalizer. All arithmetic wraps mod 2^64.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Bucket and sign for input coordinate `coord`, repetition `rep`. The key
// packs (coord, rep) into one 64-bit word, mixes it, and folds in the seed
// with a second mix. The bucket is a multiply-shift range reduction of the
// high 32 bits (bias <= 2^-16 per bucket for buckets <= 2^16); the sign is
// the low bit. Caller guarantees 1 <= buckets <= 2^16.
constexpr Draw draw(std::uint64_t seed, std::uint32_t coord, std::uint32_t rep,
                    std::uint32_t buckets) noexcept {
  const std::uint64_t key = (static_cast<std::uint64_t>(coord) << 32) | rep;
  const std::uint64_t w = mix64(seed ^ mix64(key));
  const auto bucket = static_cast<std::uint32_t>(((w >> 32) * buckets) >> 32);
  const std::int32_t sign = (w & 1U) == 0 ? 1 : -1;
  return Draw{bucket, sign};
}

}  // namespace chsk
