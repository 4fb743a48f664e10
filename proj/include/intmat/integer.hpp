#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace intmat {

using BigInt = boost::multiprecision::cpp_int;
using Int128 = __int128;

/// Floor of a/b for b != 0 (rounds toward negative infinity).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Ceiling of a/b for b != 0.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

/// Largest s with s*s <= v, for v >= 0.
///
/// Newton iteration seeded above the root, then verified so that
/// s^2 <= v < (s+1)^2 holds exactly.
inline std::int64_t isqrt(std::int64_t v) {
  if (v < 0) throw std::domain_error("isqrt of a negative value");
  if (v < 2) return v;
  auto x = static_cast<Int128>(v);
  Int128 s = x;
  Int128 next = (s + 1) / 2;
  while (next < s) {
    s = next;
    next = (s + x / s) / 2;
  }
  while (s * s > x) --s;
  while ((s + 1) * (s + 1) <= x) ++s;
  return static_cast<std::int64_t>(s);
}

inline bool is_perfect_square(std::int64_t v) {
  if (v < 0) return false;
  const std::int64_t s = isqrt(v);
  return s * s == v;
}

inline BigInt to_big(Int128 v) {
  const bool neg = v < 0;
  // magnitude via unsigned to survive INT128_MIN
  unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
  BigInt out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return neg ? BigInt(-out) : out;
}

inline BigInt to_big(const BigInt& v) { return v; }
inline BigInt to_big(std::int64_t v) { return BigInt(v); }

inline std::string to_string(const BigInt& v) { return v.str(); }

inline std::string to_string(Int128 v) { return to_big(v).str(); }
inline std::string to_string(std::int64_t v) { return std::to_string(v); }

/// (2k+1)^exponent, the number of matrices or tuples over {-k..k}.
inline BigInt alphabet_power(std::int64_t k, unsigned exponent) {
  BigInt base = 2 * k + 1;
  return boost::multiprecision::pow(base, exponent);
}

}  // namespace intmat
