#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace qisim {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child stream key from a master seed and a tuple of task
// coordinates. Each coordinate is absorbed in order, so (1,2) and (2,1)
// give different keys.
constexpr std::uint64_t derive_key(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t c : coords) {
    h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/// Counter-based 64-bit generator: output i is mix64(key + (i+1)·γ).
///
/// Construction is free, so one stream per task (frame, trial group, ...)
/// costs nothing and parallel scheduling cannot change which numbers a
/// task sees. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform double in [0, 1) with 53 random bits.
template <class Urbg>
double uniform01(Urbg& rng) {
  return std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
}

}  // namespace qisim
