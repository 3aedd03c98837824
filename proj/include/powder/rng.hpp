#pragma once

#include <cstdint>

namespace powder {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-slot stream key. Slot i of a world built with `seed` always gets the
// same key, so a slot can be lifted out of a batch and stepped alone.
constexpr std::uint64_t slot_stream_key(std::uint64_t seed, std::uint64_t slot) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(slot + 0x5851F42D4C957F2Dull));
}

// Counter-based draw: a pure function of (stream, tick, rule, cell). No state
// is carried between cells, so scan order and batching cannot change results.
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t tick, std::uint32_t rule,
                                     std::uint64_t cell) noexcept {
  std::uint64_t h = splitmix64(key ^ (tick * 0xD1B54A32D192ED03ull));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(rule) << 56) ^ cell);
  return h;
}

constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential generator for procedural generation and policies. Avoids the
// std distributions, whose output is implementation-defined.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi] (inclusive).
  constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    if (hi <= lo) return lo;
    const auto span = static_cast<unsigned __int128>(static_cast<std::uint64_t>(hi - lo) + 1u);
    return lo + static_cast<std::int64_t>((span * next()) >> 64);
  }

  constexpr double uniform01() noexcept { return to_unit(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace powder
