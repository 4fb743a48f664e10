#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "intmat/integer.hpp"

namespace intmat {

/// Dense univariate polynomial, coefficients stored constant term first.
template <class T>
class Polynomial {
 public:
  Polynomial() : coeffs_{T(0)} {}
  explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(T(0));
    trim();
  }

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  const std::vector<T>& coeffs() const noexcept { return coeffs_; }
  const T& leading() const { return coeffs_.back(); }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == T(0); }

  /// Horner evaluation at x, exact in T.
  template <class X>
  T operator()(const X& x) const {
    T acc(0);
    const T xx(x);
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * xx + coeffs_[i];
    return acc;
  }

  /// Number of leading zero coefficients, i.e. multiplicity of the root 0.
  std::size_t zero_root_multiplicity() const {
    if (is_zero()) throw std::domain_error("zero polynomial");
    std::size_t m = 0;
    while (coeffs_[m] == T(0)) ++m;
    return m;
  }

  /// Divide out x^m (requires the low m coefficients to vanish).
  Polynomial shift_down(std::size_t m) const {
    for (std::size_t i = 0; i < m; ++i)
      if (coeffs_[i] != T(0)) throw std::domain_error("x^m does not divide polynomial");
    return Polynomial(std::vector<T>(coeffs_.begin() + static_cast<std::ptrdiff_t>(m), coeffs_.end()));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
    os << '[';
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i) os << (i ? ", " : "") << to_string(p.coeffs_[i]);
    return os << ']';
  }

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == T(0)) coeffs_.pop_back();
  }

  std::vector<T> coeffs_;
};

using IntPolynomial = Polynomial<BigInt>;

template <class T>
Polynomial<BigInt> to_big(const Polynomial<T>& p) {
  std::vector<BigInt> out;
  out.reserve(p.coeffs().size());
  for (const T& c : p.coeffs()) out.push_back(to_big(c));
  return Polynomial<BigInt>(std::move(out));
}

}  // namespace intmat
