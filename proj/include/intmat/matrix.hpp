#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intmat/integer.hpp"

namespace intmat {

namespace detail {
struct MatrixAccess;
}

/// Square matrix of exact integers stored row-major.
///
/// The optional bound k records that every entry lies in {-k, ..., k}; it is
/// checked on construction and used as the scale for eigenvalue search.
/// Indices are zero-based throughout.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix(std::size_t n, std::vector<T> entries,
         std::optional<std::int64_t> bound = std::nullopt)
      : n_(n), entries_(std::move(entries)), bound_(bound) {
    if (n_ == 0) throw std::invalid_argument("matrix dimension must be >= 1");
    if (entries_.size() != n_ * n_)
      throw std::invalid_argument("matrix needs exactly n*n entries");
    if (bound_) {
      if (*bound_ < 1) throw std::invalid_argument("entry bound must be >= 1");
      for (const T& e : entries_) {
        if (e > T(*bound_) || e < T(-*bound_))
          throw std::invalid_argument("matrix entry exceeds its declared bound");
      }
    }
  }

  static Matrix zeros(std::size_t n) { return Matrix(n, std::vector<T>(n * n, T(0))); }

  static Matrix identity(std::size_t n) {
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = T(1);
    return m;
  }

  static Matrix filled(std::size_t n, const T& value) {
    return Matrix(n, std::vector<T>(n * n, value));
  }

  std::size_t size() const noexcept { return n_; }
  const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const T> entries() const noexcept { return entries_; }
  std::span<const T> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
  std::optional<std::int64_t> bound() const noexcept { return bound_; }

  Matrix with_bound(std::int64_t k) const { return Matrix(n_, entries_, k); }

  /// Minor with row i and column j removed.
  Matrix minor(std::size_t i, std::size_t j) const {
    if (n_ < 2) throw std::invalid_argument("minor needs n >= 2");
    if (i >= n_ || j >= n_) throw std::out_of_range("minor index out of range");
    std::vector<T> out;
    out.reserve((n_ - 1) * (n_ - 1));
    for (std::size_t r = 0; r < n_; ++r) {
      if (r == i) continue;
      for (std::size_t c = 0; c < n_; ++c)
        if (c != j) out.push_back((*this)(r, c));
    }
    return Matrix(n_ - 1, std::move(out));
  }

  /// Trailing principal block, rows/columns [from, n).
  Matrix trailing_block(std::size_t from) const {
    if (from >= n_) throw std::out_of_range("trailing block is empty");
    const std::size_t m = n_ - from;
    std::vector<T> out;
    out.reserve(m * m);
    for (std::size_t r = from; r < n_; ++r)
      for (std::size_t c = from; c < n_; ++c) out.push_back((*this)(r, c));
    return Matrix(m, std::move(out));
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.n_ == b.n_ && a.entries_ == b.entries_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.n_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.n_; ++j) os << (j ? ", " : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  friend struct detail::MatrixAccess;

  std::size_t n_;
  std::vector<T> entries_;
  std::optional<std::int64_t> bound_;
};

using IntMatrix = Matrix<std::int64_t>;
using BigMatrix = Matrix<BigInt>;

namespace detail {
// Enumerators and samplers rewrite a scratch matrix in place; they keep the
// bound invariant themselves.
struct MatrixAccess {
  template <class T>
  static std::vector<T>& entries(Matrix<T>& m) { return m.entries_; }
};
}  // namespace detail

/// Largest |entry|; the bound to use when none was declared.
inline std::int64_t max_abs_entry(const IntMatrix& m) {
  std::int64_t best = 0;
  for (std::int64_t e : m.entries()) best = std::max(best, e < 0 ? -e : e);
  return best;
}

inline std::int64_t effective_bound(const IntMatrix& m) {
  return m.bound().value_or(max_abs_entry(m));
}

template <class T>
BigMatrix to_big(const Matrix<T>& m) {
  std::vector<BigInt> out(m.entries().begin(), m.entries().end());
  return BigMatrix(m.size(), std::move(out));
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  const std::size_t n = a.size();
  std::vector<T> out(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a(i, l) * b(l, j);
  return Matrix<T>(n, std::move(out));
}

/// M - lambda*I, keeping exact integers.
inline IntMatrix shifted(const IntMatrix& m, std::int64_t lambda) {
  std::vector<std::int64_t> out(m.entries().begin(), m.entries().end());
  for (std::size_t i = 0; i < m.size(); ++i) out[i * m.size() + i] -= lambda;
  return IntMatrix(m.size(), std::move(out));
}

}  // namespace intmat
