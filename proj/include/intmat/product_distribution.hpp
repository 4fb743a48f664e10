#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "intmat/budget.hpp"
#include "intmat/integer.hpp"

namespace intmat {

namespace detail {

/// Calls fn(m, multiplicity) for every pair (x, y) in {-k..k}^2 whose shifted
/// product m = (x - shift)(y - shift) lies in [lo, hi]. The pairs with
/// x = shift are reported together as one call with multiplicity 2k+1.
///
/// Work is O(k + number of visited pairs), so disjoint windows partition the
/// full O(k^2) enumeration with only O(k) overhead each.
template <class Fn>
void for_each_product(std::int64_t k, std::int64_t shift, std::int64_t lo, std::int64_t hi, Fn&& fn) {
  const std::int64_t ulo = -k - shift, uhi = k - shift;
  for (std::int64_t u = ulo; u <= uhi; ++u) {
    if (u == 0) {
      if (lo <= 0 && 0 <= hi) fn(std::int64_t{0}, 2 * k + 1);
      continue;
    }
    std::int64_t vmin, vmax;
    if (u > 0) {
      vmin = ceil_div(lo, u);
      vmax = floor_div(hi, u);
    } else {
      vmin = ceil_div(hi, u);
      vmax = floor_div(lo, u);
    }
    if (vmin < ulo) vmin = ulo;
    if (vmax > uhi) vmax = uhi;
    for (std::int64_t v = vmin; v <= vmax; ++v) fn(u * v, std::int64_t{1});
  }
}

/// Adds pair counts for products in [lo, lo + out.size()) into out.
inline void accumulate_products(std::int64_t k, std::int64_t shift, std::int64_t lo, std::span<std::int64_t> out) {
  const auto hi = lo + static_cast<std::int64_t>(out.size()) - 1;
  for_each_product(k, shift, lo, hi, [&](std::int64_t m, std::int64_t mult) { out[static_cast<std::size_t>(m - lo)] += mult; });
}

}  // namespace detail

/// m -> #{(x, y) in {-k..k}^2 : (x - shift)(y - shift) = m}, stored densely
/// over [-(k+|shift|)^2, (k+|shift|)^2].
class ProductDistribution {
 public:
  ProductDistribution(std::int64_t k, std::int64_t shift, const Budgets& budgets = Budgets::from_environment())
      : k_(k), shift_(shift) {
    if (k < 1) throw std::invalid_argument("product distribution needs k >= 1");
    const std::int64_t reach = k + (shift < 0 ? -shift : shift);
    extent_ = reach * reach;
    const auto cells = static_cast<std::uint64_t>(2 * extent_ + 1);
    budgets.require_memory(cells * sizeof(std::int64_t), "product distribution");
    counts_.assign(cells, 0);
    detail::accumulate_products(k, shift, -extent_, counts_);
  }

  std::int64_t k() const noexcept { return k_; }
  std::int64_t shift() const noexcept { return shift_; }
  std::int64_t min_value() const noexcept { return -extent_; }
  std::int64_t max_value() const noexcept { return extent_; }

  std::int64_t operator[](std::int64_t m) const noexcept {
    if (m < -extent_ || m > extent_) return 0;
    return counts_[static_cast<std::size_t>(m + extent_)];
  }

  /// Dense counts, index i holding the value for m = min_value() + i.
  std::span<const std::int64_t> dense() const noexcept { return counts_; }

  std::int64_t total() const noexcept {
    std::int64_t s = 0;
    for (std::int64_t c : counts_) s += c;
    return s;
  }

 private:
  std::int64_t k_;
  std::int64_t shift_;
  std::int64_t extent_ = 0;
  std::vector<std::int64_t> counts_;
};

inline ProductDistribution product_distribution(std::int64_t k, std::int64_t shift,
                                                const Budgets& budgets = Budgets::from_environment()) {
  return ProductDistribution(k, shift, budgets);
}

}  // namespace intmat
