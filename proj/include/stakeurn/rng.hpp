#pragma once

#include <cstdint>
#include <limits>

namespace stakeurn {

// SplitMix64 (Steele, Lea & Flood 2014), the generator used to seed
// xoshiro/xorshift families. Output is a pure function of the 64-bit state,
// so streams are reproducible on every platform. Distinct seeds walk the
// same Weyl sequence at offsets that never meet within 2^64 draws.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random mantissa bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Stream seed for repetition r of an experiment. Independent of execution
// order, chunking and worker count.
constexpr std::uint64_t repetition_seed(std::uint64_t base_seed, std::uint64_t repetition) noexcept {
  return base_seed ^ repetition;
}

}  // namespace stakeurn
