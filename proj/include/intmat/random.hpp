#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace intmat {

/// SplitMix64, used only to expand a 64-bit seed into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** (Blackman & Vigna), period 2^256 - 1.
///
/// Substream w of a master seed is the SplitMix64-seeded base state advanced
/// by w jumps of 2^128 steps, so substreams never overlap.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  static constexpr const char* kGeneratorId = "xoshiro256**/splitmix64-seed/jump128-substreams/v1";

  explicit Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  static Xoshiro256 from_state(const std::array<std::uint64_t, 4>& state) {
    Xoshiro256 g(0);
    g.s_ = state;
    return g;
  }

  static Xoshiro256 substream(std::uint64_t seed, std::uint64_t index) {
    Xoshiro256 g(seed);
    for (std::uint64_t i = 0; i < index; ++i) g.jump();
    return g;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Equivalent to 2^128 calls of operator().
  void jump() {
    static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
                                              0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump)
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b))
          for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
        (*this)();
      }
    s_ = acc;
  }

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Uniform integer in [0, n) by rejection on the top bits (no modulo bias).
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below needs n >= 1");
  if (n == 1) return 0;
  const int bits = std::bit_width(n - 1);
  for (;;) {
    const std::uint64_t r = rng() >> (64 - bits);
    if (r < n) return r;
  }
}

/// Uniform entry of {-k..k}.
template <class Rng>
std::int64_t uniform_entry(Rng& rng, std::int64_t k) {
  return static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(2 * k + 1))) - k;
}

}  // namespace intmat
