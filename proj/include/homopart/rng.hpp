#pragma once

#include <cstdint>
#include <string_view>

// Counter-based randomness. Every random decision is a pure function of
// (key, index), so results do not depend on evaluation order or thread count.
namespace homopart::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) noexcept {
  return splitmix64(key ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

/// Labeled sub-seed, e.g. derive(seed, "anchors").
constexpr std::uint64_t derive(std::uint64_t seed, std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return combine(seed, h);
}

/// Uniform double in [0, 1) from 53 high bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by multiply-high; bound > 0.
constexpr std::uint64_t below(std::uint64_t bits, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * bound) >> 64);
}

/// Keyed counter stream: value(i) is independent of how many values were read before.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}
  constexpr std::uint64_t at(std::uint64_t index) const noexcept { return combine(key_, index); }
  constexpr double unit_at(std::uint64_t index) const noexcept { return to_unit(at(index)); }
  constexpr std::uint64_t below_at(std::uint64_t index, std::uint64_t bound) const noexcept {
    return below(at(index), bound);
  }
  constexpr Stream child(std::uint64_t index) const noexcept { return Stream(at(index) ^ 0x5851f42d4c957f2dULL); }

  // Sequential use.
  std::uint64_t next() noexcept { return at(counter_++); }
  double next_unit() noexcept { return to_unit(next()); }
  std::uint64_t next_below(std::uint64_t bound) noexcept { return below(next(), bound); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace homopart::rng
