#pragma once

// Exact integer linear algebra over IntMatrix: determinants, cofactors,
// adjugates, characteristic polynomials and integer eigenvalues.
//
// Every result is exact. Fixed-width arithmetic is used only behind an
// explicit Hadamard-bound guard; anything larger goes through BigInt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "intmat/integer.hpp"
#include "intmat/matrix.hpp"
#include "intmat/polynomial.hpp"

namespace intmat {

struct GershgorinDisk {
  std::int64_t center = 0;
  std::int64_t radius = 0;

  bool contains(std::int64_t z) const {
    const std::int64_t d = z - center;
    return (d < 0 ? -d : d) <= radius;
  }
  friend bool operator==(const GershgorinDisk&, const GershgorinDisk&) = default;
};

namespace detail {

// log2 of the Hadamard bound prod_i ||row_i||; -inf when some row is zero.
inline double hadamard_log2(const IntMatrix& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    long double sq = 0.0L;
    for (std::int64_t e : m.row(i)) sq += static_cast<long double>(e) * static_cast<long double>(e);
    if (sq == 0.0L) return -std::numeric_limits<double>::infinity();
    acc += 0.5 * static_cast<double>(std::log2(sq));
  }
  return acc;
}

// Margin below 2^63 so that pivot products a*b stay inside __int128.
inline constexpr double kInt128DetBits = 60.0;
inline constexpr double kInt128WorkBits = 118.0;

/// Fraction-free (Bareiss) elimination. Every intermediate entry is a minor of
/// the input, and each division is exact.
template <class T>
T bareiss_det(std::vector<T> a, std::size_t n) {
  T sign(1);
  T prev(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == T(0)) {
      std::size_t p = k + 1;
      while (p < n && a[p * n + k] == T(0)) ++p;
      if (p == n) return T(0);
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
      sign = -sign;
    }
    const T pivot = a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const T lead = a[i * n + k];
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i * n + j] = (pivot * a[i * n + j] - lead * a[k * n + j]) / prev;
      }
      a[i * n + k] = T(0);
    }
    prev = pivot;
  }
  return sign * a[(n - 1) * n + (n - 1)];
}

/// Determinant in __int128 when the Hadamard bound allows it.
inline std::optional<Int128> det_small(const IntMatrix& m) {
  const double bits = hadamard_log2(m);
  if (bits == -std::numeric_limits<double>::infinity()) return Int128(0);
  if (bits > kInt128DetBits) return std::nullopt;
  std::vector<Int128> a(m.entries().begin(), m.entries().end());
  return bareiss_det(std::move(a), m.size());
}

// Upper estimate (bits) of every quantity touched while interpolating the
// characteristic polynomial from det(xI - M), x = 0..n.
inline double char_poly_work_bits(const IntMatrix& m) {
  const double n = static_cast<double>(m.size());
  const double entry = static_cast<double>(max_abs_entry(m)) + n;
  const double det_bits = n * (0.5 * std::log2(n) + std::log2(entry));
  return det_bits + n + std::log2(n + 1.0) + 2.0;
}

template <class T>
T det_of(const IntMatrix& m) {
  if constexpr (std::is_same_v<T, Int128>) {
    std::vector<Int128> a(m.entries().begin(), m.entries().end());
    return bareiss_det(std::move(a), m.size());
  } else {
    std::vector<BigInt> a(m.entries().begin(), m.entries().end());
    return bareiss_det(std::move(a), m.size());
  }
}

/// det(xI - M) at x = 0..n, then Newton forward differences against the
/// falling-factorial basis. Each division by j! must be exact.
template <class T>
Polynomial<T> char_poly_interpolated(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<T> diff(n + 1);
  for (std::size_t x = 0; x <= n; ++x) {
    IntMatrix shifted_m = shifted(m, static_cast<std::int64_t>(x));
    // det(xI - M) = (-1)^n det(M - xI)
    T d = det_of<T>(shifted_m);
    diff[x] = (n % 2 == 0) ? d : T(-d);
  }
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t x = n; x >= j; --x) diff[x] = diff[x] - diff[x - 1];

  std::vector<T> result(n + 1, T(0));
  std::vector<T> falling{T(1)};  // x(x-1)...(x-j+1)
  T factorial(1);
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) {
      factorial = factorial * T(static_cast<std::int64_t>(j));
      std::vector<T> next(falling.size() + 1, T(0));
      const T root(static_cast<std::int64_t>(j - 1));
      for (std::size_t i = 0; i < falling.size(); ++i) {
        next[i + 1] = next[i + 1] + falling[i];
        next[i] = next[i] - root * falling[i];
      }
      falling = std::move(next);
    }
    if (diff[j] % factorial != T(0))
      throw std::logic_error("characteristic polynomial interpolation: inexact division");
    const T scale = diff[j] / factorial;
    for (std::size_t i = 0; i < falling.size(); ++i) result[i] = result[i] + scale * falling[i];
  }
  return Polynomial<T>(std::move(result));
}

}  // namespace detail

inline BigInt det(const IntMatrix& m) {
  if (auto small = detail::det_small(m)) return to_big(*small);
  std::vector<BigInt> a(m.entries().begin(), m.entries().end());
  return detail::bareiss_det(std::move(a), m.size());
}

inline BigInt det(const BigMatrix& m) {
  std::vector<BigInt> a(m.entries().begin(), m.entries().end());
  return detail::bareiss_det(std::move(a), m.size());
}

/// Unsigned cofactor: the determinant of the minor with row i and column j
/// deleted. The sign (-1)^(i+j) belongs to the adjugate, not here.
inline BigInt cofactor(const IntMatrix& m, std::size_t i, std::size_t j) {
  if (i >= m.size() || j >= m.size()) throw std::out_of_range("cofactor index out of range");
  if (m.size() < 2) throw std::invalid_argument("cofactor needs n >= 2");
  return det(m.minor(i, j));
}

inline BigMatrix adjugate(const IntMatrix& m) {
  const std::size_t n = m.size();
  if (n < 2) throw std::invalid_argument("adjugate needs n >= 2");
  std::vector<BigInt> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      BigInt c = cofactor(m, j, i);
      out[i * n + j] = ((i + j) % 2 == 0) ? c : BigInt(-c);
    }
  return BigMatrix(n, std::move(out));
}

/// det(lambda*I - M), monic of degree n.
inline IntPolynomial char_poly(const IntMatrix& m) {
  if (detail::char_poly_work_bits(m) <= detail::kInt128WorkBits)
    return to_big(detail::char_poly_interpolated<Int128>(m));
  return detail::char_poly_interpolated<BigInt>(m);
}

inline std::vector<GershgorinDisk> gershgorin_disks(const IntMatrix& m) {
  std::vector<GershgorinDisk> disks;
  disks.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::int64_t r = 0;
    for (std::size_t j = 0; j < m.size(); ++j)
      if (j != i) r += m(i, j) < 0 ? -m(i, j) : m(i, j);
    disks.push_back({m(i, i), r});
  }
  return disks;
}

inline bool in_disk_union(const std::vector<GershgorinDisk>& disks, std::int64_t z) {
  return std::any_of(disks.begin(), disks.end(), [z](const GershgorinDisk& d) { return d.contains(z); });
}

namespace detail {

// Largest modulus any eigenvalue can have: n*k, tightened by the Gershgorin
// row extents and the Frobenius norm (both also bound the spectral radius).
inline std::int64_t eigenvalue_search_radius(const IntMatrix& m) {
  const auto n = static_cast<std::int64_t>(m.size());
  std::int64_t radius = n * effective_bound(m);
  std::int64_t extent = 0;
  for (const GershgorinDisk& d : gershgorin_disks(m))
    extent = std::max(extent, (d.center < 0 ? -d.center : d.center) + d.radius);
  radius = std::min(radius, extent);
  Int128 fro = 0;
  for (std::int64_t e : m.entries()) fro += static_cast<Int128>(e) * e;
  if (fro <= std::numeric_limits<std::int64_t>::max())
    radius = std::min(radius, isqrt(static_cast<std::int64_t>(fro)));
  return radius;
}

template <class T>
T abs_of(const T& v) { return v < T(0) ? T(-v) : v; }

// Rational-root scan: strip x^m, then test divisors d of the nonzero
// constant term with |d| <= radius.
template <class T>
std::vector<std::int64_t> integer_roots(const Polynomial<T>& p, std::int64_t radius) {
  std::vector<std::int64_t> roots;
  const std::size_t zero_mult = p.zero_root_multiplicity();
  if (zero_mult > 0) roots.push_back(0);
  const Polynomial<T> q = p.shift_down(zero_mult);
  if (q.degree() == 0) return roots;
  const T c = abs_of(q[0]);
  const bool c_fits = c <= T(std::numeric_limits<std::int64_t>::max());
  const std::int64_t c64 = c_fits ? static_cast<std::int64_t>(c) : 0;
  const std::int64_t limit = c_fits ? std::min(radius, c64) : radius;
  for (std::int64_t d = 1; d <= limit; ++d) {
    const bool divides = c_fits ? (c64 % d == 0) : (c % T(d) == T(0));
    if (!divides) continue;
    if (q(T(d)) == T(0)) roots.push_back(d);
    if (q(T(-d)) == T(0)) roots.push_back(-d);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline double bit_length(const BigInt& v) {
  return v == 0 ? 0.0 : static_cast<double>(boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1);
}

}  // namespace detail

/// Distinct integer eigenvalues, ascending. By the rational root theorem these
/// are all the rational eigenvalues.
inline std::vector<std::int64_t> integer_eigenvalues(const IntMatrix& m) {
  const std::int64_t radius = detail::eigenvalue_search_radius(m);
  const double n = static_cast<double>(m.size());
  if (detail::char_poly_work_bits(m) <= detail::kInt128WorkBits) {
    Polynomial<Int128> p = detail::char_poly_interpolated<Int128>(m);
    // Horner partial sums are bounded by sum |c_i| (radius+1)^i.
    double coeff_bits = 0.0;
    for (const Int128& c : p.coeffs()) coeff_bits = std::max(coeff_bits, detail::bit_length(to_big(c)));
    if (coeff_bits + n * std::log2(static_cast<double>(radius) + 1.0) + std::log2(n + 1.0) + 1.0 <
        detail::kInt128WorkBits)
      return detail::integer_roots(p, radius);
    return detail::integer_roots(to_big(p), radius);
  }
  return detail::integer_roots(detail::char_poly_interpolated<BigInt>(m), radius);
}

/// Whether lambda is an eigenvalue, decided by det(M - lambda*I) = 0.
inline bool has_eigenvalue(const IntMatrix& m, std::int64_t lambda) {
  return det(shifted(m, lambda)) == 0;
}

inline BigInt discriminant_2x2(const IntMatrix& m) {
  if (m.size() != 2) throw std::invalid_argument("2x2 discriminant needs n = 2");
  const BigInt a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  return (a - d) * (a - d) + 4 * b * c;
}

/// (a-d)^2 + 4bc >= 0.
inline bool has_real_eigenvalues_2x2(const IntMatrix& m) { return discriminant_2x2(m) >= 0; }

/// Both real eigenvalues, ascending, from exact trace and discriminant.
inline std::pair<double, double> real_eigenvalues_2x2(const IntMatrix& m) {
  const BigInt disc = discriminant_2x2(m);
  if (disc < 0) throw std::domain_error("matrix has complex eigenvalues");
  const double t = static_cast<double>(m(0, 0)) + static_cast<double>(m(1, 1));
  const double s = std::sqrt(disc.convert_to<double>());
  return {(t - s) / 2.0, (t + s) / 2.0};
}

struct AdjugateIdentitySides {
  BigInt cofactor_minor;  // a11*a22 - a12*a21
  BigInt det_product;     // det(M) * det(Z)
  bool holds() const { return cofactor_minor == det_product; }
};

/// Both sides of a11*a22 - a12*a21 = det(M)*det(Z), where a_ij are unsigned
/// cofactors and Z is M without its first two rows and columns.
inline AdjugateIdentitySides adjugate_identity_sides(const IntMatrix& m) {
  if (m.size() < 3) throw std::invalid_argument("adjugate identity needs n >= 3");
  const BigInt a11 = cofactor(m, 0, 0), a22 = cofactor(m, 1, 1);
  const BigInt a12 = cofactor(m, 0, 1), a21 = cofactor(m, 1, 0);
  return {a11 * a22 - a12 * a21, det(m) * det(m.trailing_block(2))};
}

inline bool verify_adjugate_identity(const IntMatrix& m) { return adjugate_identity_sides(m).holds(); }

}  // namespace intmat
