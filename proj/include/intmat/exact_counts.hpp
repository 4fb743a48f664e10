#pragma once

// Exact counts of matrices in M_n(k) = {n x n matrices with entries in
// {-k..k}} having a spectral property.
//
// brute_force_count enumerates every matrix and is the ground truth for
// small instances. The 2x2 counters reduce each property to sums over the
// product distribution r(m) = #{(x, y) : xy = m} and run in O(k^2).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intmat/budget.hpp"
#include "intmat/count_record.hpp"
#include "intmat/integer.hpp"
#include "intmat/linalg.hpp"
#include "intmat/matrix.hpp"
#include "intmat/parallel.hpp"
#include "intmat/product_distribution.hpp"

namespace intmat {

struct CountOptions {
  unsigned workers = 1;
  Budgets budgets = Budgets::from_environment();
};

/// Counts matrices of M_n(k) satisfying pred by full enumeration.
/// pred is called concurrently from several workers and must be pure.
template <class Pred>
CountRecord brute_force_count(int n, std::int64_t k, PropertyTag property, Pred&& pred,
                              const CountOptions& opts = {}) {
  if (n < 1 || k < 1) throw std::invalid_argument("brute force needs n >= 1 and k >= 1");
  const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const BigInt total = alphabet_power(k, static_cast<unsigned>(cells));
  if (total > opts.budgets.brute_force_matrices)
    throw BudgetExceeded("brute-force", to_string(total) + " matrices exceeds cap " +
                                            std::to_string(opts.budgets.brute_force_matrices));
  const auto space = total.convert_to<std::uint64_t>();
  const auto base = static_cast<std::uint64_t>(2 * k + 1);

  auto partial = run_workers(opts.workers, [&](unsigned w) -> std::uint64_t {
    const Slice slice = slice_for(space, std::max(1u, opts.workers), w);
    if (slice.begin == slice.end) return 0;
    IntMatrix scratch = IntMatrix::zeros(static_cast<std::size_t>(n)).with_bound(k);
    auto& e = detail::MatrixAccess::entries(scratch);
    // last entry is the fastest-moving digit
    std::uint64_t idx = slice.begin;
    for (std::size_t c = cells; c-- > 0;) {
      e[c] = static_cast<std::int64_t>(idx % base) - k;
      idx /= base;
    }
    std::uint64_t hits = 0;
    for (std::uint64_t i = slice.begin; i < slice.end; ++i) {
      if (pred(std::as_const(scratch))) ++hits;
      for (std::size_t c = cells; c-- > 0;) {
        if (e[c] < k) {
          ++e[c];
          break;
        }
        e[c] = -k;
      }
    }
    return hits;
  });
  std::uint64_t hits = 0;
  for (std::uint64_t h : partial) hits += h;
  return make_count_record(std::move(property), n, k, BigInt(hits));
}

namespace detail {

// Products are streamed in windows of at most this many consecutive values.
inline constexpr std::int64_t kProductWindow = std::int64_t{1} << 20;

// Window length that keeps one buffer per worker inside the memory budget.
inline std::int64_t product_window(const Budgets& budgets, unsigned workers) {
  constexpr std::int64_t kMinWindow = 1024;
  const std::uint64_t per_worker = budgets.memory_bytes / sizeof(std::int64_t) / std::max(1u, workers);
  const auto window = static_cast<std::int64_t>(std::min<std::uint64_t>(per_worker, kProductWindow));
  if (window < kMinWindow)
    budgets.require_memory(kMinWindow * sizeof(std::int64_t) * std::max(1u, workers), "product window");
  return std::max(window, kMinWindow);
}

// D(s) = #{(a, d) in {-k..k}^2 : a - d = s}.
constexpr std::int64_t difference_count(std::int64_t k, std::int64_t s) {
  return 2 * k + 1 - (s < 0 ? -s : s);
}

}  // namespace detail

/// |M^0_2(k)| = sum_m r(m)^2 with r the unshifted product distribution.
///
/// Uses r(m) = r(-m): the total is r(0)^2 + 2 sum_{m>0} r(m)^2, and the
/// positive products are streamed window by window so memory stays O(window).
inline CountRecord count_singular_2x2(std::int64_t k, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Budgets::require_k(k, opts.budgets.max_k_singular, "fast-2x2-k");
  const std::int64_t top = k * k;
  const unsigned workers = std::max(1u, opts.workers);
  const std::int64_t window = detail::product_window(opts.budgets, workers);
  const std::int64_t windows = (top + window - 1) / window;

  auto partial = run_workers(workers, [&](unsigned w) -> std::uint64_t {
    std::vector<std::int64_t> buf;
    std::uint64_t acc = 0;
    for (std::int64_t win = w; win < windows; win += workers) {
      const std::int64_t lo = 1 + win * window;
      const std::int64_t hi = std::min(top, lo + window - 1);
      buf.assign(static_cast<std::size_t>(hi - lo + 1), 0);
      detail::accumulate_products(k, 0, lo, buf);
      for (std::int64_t r : buf) acc += static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(r);
    }
    return acc;
  });
  const auto zero = static_cast<std::uint64_t>(4 * k + 1);
  BigInt count = BigInt(zero) * zero;
  for (std::uint64_t p : partial) count += BigInt(p) * 2;
  return make_count_record(PropertyTag::singular(), 2, k, std::move(count));
}

/// |M^R_2(k)|: sum over s = a - d of D(s) * #{(b, c) : 4bc >= -s^2}.
///
/// #{bc >= -floor(s^2/4)} comes from the cumulative product distribution on
/// the negative half, streamed in windows; each worker owns a contiguous chunk
/// of [-k^2, -1] and chunk totals are prefixed afterwards.
inline CountRecord count_real_eig_2x2(std::int64_t k, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Budgets::require_k(k, opts.budgets.max_k_real, "fast-2x2-k");
  const std::int64_t bottom = -k * k;
  const std::int64_t pairs = (2 * k + 1) * (2 * k + 1);

  // query for |s|: C(q) = #{bc <= q}, q = -floor(s^2/4) - 1; q increases as |s| drops
  struct Query {
    std::int64_t q;
    std::int64_t weight;
  };
  std::vector<Query> queries;
  for (std::int64_t s = 2 * k; s >= 0; --s) {
    const std::int64_t weight = detail::difference_count(k, s) * (s == 0 ? 1 : 2);
    queries.push_back({-(s * s / 4) - 1, weight});
  }

  const unsigned workers = std::max(1u, opts.workers);
  const std::int64_t window = detail::product_window(opts.budgets, workers);
  const auto span_len = static_cast<std::uint64_t>(-bottom);  // values -k^2 .. -1
  struct Chunk {
    std::int64_t total = 0;
    std::vector<std::int64_t> local;  // cumulative within chunk, per query (0 if before)
  };
  auto chunks = run_workers(workers, [&](unsigned w) -> Chunk {
    Chunk out;
    out.local.assign(queries.size(), 0);
    const Slice sl = slice_for(span_len, workers, w);
    if (sl.begin == sl.end) return out;
    const std::int64_t c_lo = bottom + static_cast<std::int64_t>(sl.begin);
    const std::int64_t c_hi = bottom + static_cast<std::int64_t>(sl.end) - 1;
    std::size_t qi = 0;
    while (qi < queries.size() && queries[qi].q < c_lo) ++qi;
    std::vector<std::int64_t> buf;
    std::int64_t running = 0;
    for (std::int64_t lo = c_lo; lo <= c_hi; lo += window) {
      const std::int64_t hi = std::min(c_hi, lo + window - 1);
      buf.assign(static_cast<std::size_t>(hi - lo + 1), 0);
      detail::accumulate_products(k, 0, lo, buf);
      for (std::int64_t m = lo; m <= hi; ++m) {
        running += buf[static_cast<std::size_t>(m - lo)];
        while (qi < queries.size() && queries[qi].q == m) out.local[qi++] = running;
      }
    }
    out.total = running;
    return out;
  });

  std::int64_t offset = 0;
  std::vector<std::int64_t> below(queries.size(), 0);
  for (unsigned w = 0; w < workers; ++w) {
    const Slice sl = slice_for(span_len, workers, w);
    if (sl.begin != sl.end) {
      const std::int64_t c_lo = bottom + static_cast<std::int64_t>(sl.begin);
      const std::int64_t c_hi = bottom + static_cast<std::int64_t>(sl.end) - 1;
      for (std::size_t i = 0; i < queries.size(); ++i)
        if (queries[i].q >= c_lo && queries[i].q <= c_hi) below[i] = offset + chunks[w].local[i];
    }
    offset += chunks[w].total;
  }
  BigInt count = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    // q < -k^2 leaves below = 0; q >= -k^2 always falls in some chunk
    count += BigInt(queries[i].weight) * (pairs - below[i]);
  }
  return make_count_record(PropertyTag::real_eig(), 2, k, std::move(count));
}

/// |M^Z_2(k)|: integer eigenvalues iff (a-d)^2 + 4bc is a perfect square u^2.
/// For each s = a - d, scan u = |s|, |s|+-2, ... with u^2 in
/// [s^2 - 4k^2, s^2 + 4k^2] and add D(s) * r((u^2 - s^2)/4).
inline CountRecord count_integer_eig_2x2(std::int64_t k, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Budgets::require_k(k, opts.budgets.max_k_integer, "integer-eig-k");
  const ProductDistribution p(k, 0, opts.budgets);
  const std::int64_t four_k2 = 4 * k * k;
  const unsigned workers = std::max(1u, opts.workers);

  auto partial = run_workers(workers, [&](unsigned w) -> std::uint64_t {
    std::uint64_t acc = 0;
    for (std::int64_t s = w; s <= 2 * k; s += workers) {
      const std::int64_t s2 = s * s;
      const std::int64_t floor_sq = std::max<std::int64_t>(0, s2 - four_k2);
      std::int64_t u = isqrt(floor_sq);
      if (u * u < floor_sq) ++u;
      if ((u - s) % 2 != 0) ++u;
      const std::int64_t u_max = isqrt(s2 + four_k2);
      std::uint64_t inner = 0;
      for (; u <= u_max; u += 2) inner += static_cast<std::uint64_t>(p[(u * u - s2) / 4]);
      const auto weight = static_cast<std::uint64_t>(detail::difference_count(k, s) * (s == 0 ? 1 : 2));
      acc += weight * inner;
    }
    return acc;
  });
  std::uint64_t count = 0;
  for (std::uint64_t v : partial) count += v;
  return make_count_record(PropertyTag::integer_eig(), 2, k, BigInt(count));
}

/// Counts (a, b, c, d) with (a - lambda)(d - lambda) = bc for a fixed k while
/// reusing one unshifted product distribution across many lambda.
class LambdaEigenCounter {
 public:
  explicit LambdaEigenCounter(std::int64_t k, const Budgets& budgets = Budgets::from_environment())
      : k_(k), p_(checked_k(k, budgets), 0, budgets) {}

  std::int64_t k() const noexcept { return k_; }

  /// sum_m q_lambda(m) * p(m), visiting only shifted pairs with |m| <= k^2
  /// (p vanishes elsewhere).
  std::uint64_t count(std::int64_t lambda) const {
    if (lambda > 2 * k_ || lambda < -2 * k_) return 0;
    std::uint64_t acc = 0;
    const std::int64_t k2 = k_ * k_;
    detail::for_each_product(k_, lambda, -k2, k2, [&](std::int64_t m, std::int64_t mult) {
      acc += static_cast<std::uint64_t>(mult) * static_cast<std::uint64_t>(p_[m]);
    });
    return acc;
  }

 private:
  static std::int64_t checked_k(std::int64_t k, const Budgets& budgets) {
    Budgets::require_k(k, budgets.max_k_integer, "lambda-eig-k");
    return k;
  }

  std::int64_t k_;
  ProductDistribution p_;
};

/// |M^lambda_2(k)|; zero without any work when |lambda| > 2k.
inline CountRecord count_lambda_eig_2x2(std::int64_t k, std::int64_t lambda, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (lambda > 2 * k || lambda < -2 * k) return make_count_record(PropertyTag::lambda_eig(lambda), 2, k, 0);
  const LambdaEigenCounter counter(k, opts.budgets);
  return make_count_record(PropertyTag::lambda_eig(lambda), 2, k, BigInt(counter.count(lambda)));
}

/// |M^lambda_2(k)| for every lambda in [-2k, 2k], index lambda + 2k.
inline std::vector<std::uint64_t> lambda_eig_counts_2x2(std::int64_t k, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const LambdaEigenCounter counter(k, opts.budgets);
  const auto len = static_cast<std::size_t>(4 * k + 1);
  const unsigned workers = std::max(1u, opts.workers);
  auto parts = run_workers(workers, [&](unsigned w) {
    std::vector<std::uint64_t> out(len, 0);
    for (std::size_t i = w; i < len; i += workers) out[i] = counter.count(static_cast<std::int64_t>(i) - 2 * k);
    return out;
  });
  std::vector<std::uint64_t> counts(len, 0);
  for (const auto& part : parts)
    for (std::size_t i = 0; i < len; ++i) counts[i] += part[i];
  return counts;
}

/// Non-constant linear polynomial slope*x + intercept.
class LinearForm {
 public:
  LinearForm(std::int64_t slope, std::int64_t intercept) : slope_(slope), intercept_(intercept) {
    if (slope == 0) throw std::invalid_argument("linear form must be non-constant");
  }
  std::int64_t slope() const noexcept { return slope_; }
  std::int64_t intercept() const noexcept { return intercept_; }
  Int128 operator()(std::int64_t x) const { return static_cast<Int128>(slope_) * x + intercept_; }

  /// max |L(x)| over {-k..k}.
  Int128 reach(std::int64_t k) const {
    const Int128 a = (*this)(k), b = (*this)(-k);
    const Int128 abs_a = a < 0 ? -a : a, abs_b = b < 0 ? -b : b;
    return abs_a > abs_b ? abs_a : abs_b;
  }

 private:
  std::int64_t slope_;
  std::int64_t intercept_;
};

namespace detail {

template <class Key>
std::vector<Key> sorted_products(const LinearForm& f, const LinearForm& g, std::int64_t k) {
  std::vector<Key> out;
  out.reserve(static_cast<std::size_t>((2 * k + 1) * (2 * k + 1)));
  for (std::int64_t a = -k; a <= k; ++a)
    for (std::int64_t b = -k; b <= k; ++b) {
      if constexpr (std::is_same_v<Key, BigInt>)
        out.push_back(to_big(f(a)) * to_big(g(b)));
      else
        out.push_back(static_cast<Key>(f(a) * g(b)));
    }
  std::sort(out.begin(), out.end());
  return out;
}

// Sum over common values v of (multiplicity in lhs) * (multiplicity in rhs).
template <class Key>
BigInt matched_pairs(const std::vector<Key>& lhs, const std::vector<Key>& rhs) {
  BigInt total = 0;
  std::size_t i = 0, j = 0;
  while (i < lhs.size() && j < rhs.size()) {
    if (lhs[i] < rhs[j]) {
      ++i;
    } else if (rhs[j] < lhs[i]) {
      ++j;
    } else {
      std::size_t i2 = i, j2 = j;
      while (i2 < lhs.size() && lhs[i2] == lhs[i]) ++i2;
      while (j2 < rhs.size() && rhs[j2] == rhs[j]) ++j2;
      total += BigInt(i2 - i) * (j2 - j);
      i = i2;
      j = j2;
    }
  }
  return total;
}

}  // namespace detail

/// #{(a, b, c, d) in {-k..k}^4 : L1(a) L2(b) = L3(c) L4(d)}.
///
/// Builds the value distribution of each side in O(k^2) and matches them.
/// Dense arrays are used while |product| fits the memory budget and 2^62;
/// otherwise both sides are sorted and merged, with __int128 keys or BigInt
/// keys once products can exceed 126 bits.
inline BigInt count_solutions_linearforms(const LinearForm& l1, const LinearForm& l2, const LinearForm& l3,
                                          const LinearForm& l4, std::int64_t k, const CountOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto pairs = static_cast<std::uint64_t>((2 * k + 1) * (2 * k + 1));
  const Int128 reach = std::max({l1.reach(k), l2.reach(k), l3.reach(k), l4.reach(k)});
  constexpr Int128 kDenseReach = Int128{1} << 31;
  if (reach <= kDenseReach) {
    const Int128 extent = reach * reach;
    const auto cells = static_cast<std::uint64_t>(2 * extent + 1);
    if (extent < static_cast<Int128>(opts.budgets.memory_bytes) && cells * sizeof(std::int64_t) <= opts.budgets.memory_bytes) {
      const auto off = static_cast<std::int64_t>(extent);
      std::vector<std::int64_t> dist(cells, 0);
      for (std::int64_t a = -k; a <= k; ++a)
        for (std::int64_t b = -k; b <= k; ++b) ++dist[static_cast<std::size_t>(static_cast<std::int64_t>(l1(a) * l2(b)) + off)];
      BigInt total = 0;
      std::uint64_t acc = 0;
      for (std::int64_t c = -k; c <= k; ++c)
        for (std::int64_t d = -k; d <= k; ++d) {
          acc += static_cast<std::uint64_t>(dist[static_cast<std::size_t>(static_cast<std::int64_t>(l3(c) * l4(d)) + off)]);
        }
      total = acc;
      return total;
    }
  }
  opts.budgets.require_memory(2 * pairs * sizeof(Int128), "linear-form product lists");
  if (reach < (Int128{1} << 62))
    return detail::matched_pairs(detail::sorted_products<Int128>(l1, l2, k), detail::sorted_products<Int128>(l3, l4, k));
  return detail::matched_pairs(detail::sorted_products<BigInt>(l1, l2, k), detail::sorted_products<BigInt>(l3, l4, k));
}

/// |M^Z_n(k)| by enumeration; matrices with any integer eigenvalue.
inline CountRecord count_integer_eig_any_n(int n, std::int64_t k, const CountOptions& opts = {}) {
  return brute_force_count(
      n, k, PropertyTag::integer_eig(), [](const IntMatrix& m) { return !integer_eigenvalues(m).empty(); }, opts);
}

/// Least-squares slope of log(count) against log(k).
struct GrowthProbe {
  std::string property;
  int n = 0;
  std::vector<std::pair<std::int64_t, BigInt>> points;
  double exponent = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  double epsilon_margin = 0.35;
};

inline GrowthProbe growth_probe(std::span<const CountRecord> records) {
  if (records.size() < 3) throw std::invalid_argument("growth probe needs at least 3 records");
  GrowthProbe probe;
  probe.property = records.front().property.name();
  if (records.front().property.kind == Property::lambda_eig)
    probe.property += "(" + std::to_string(records.front().property.lambda) + ")";
  probe.n = records.front().n;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CountRecord& r = records[i];
    if (!(r.property == records.front().property) || r.n != probe.n)
      throw std::invalid_argument("growth probe records mix properties or dimensions");
    if (i > 0 && r.k <= records[i - 1].k) throw std::invalid_argument("growth probe needs strictly increasing k");
    if (r.count <= 0) throw std::invalid_argument("growth probe needs positive counts");
    probe.points.emplace_back(r.k, r.count);
  }
  std::vector<double> xs, ys;
  for (const auto& [k, c] : probe.points) {
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(c.convert_to<double>()));
  }
  const double nx = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nx;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  probe.exponent = sxy / sxx;
  probe.intercept = my - probe.exponent * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) probe.residuals.push_back(ys[i] - (probe.intercept + probe.exponent * xs[i]));
  return probe;
}

/// Solution counts for a family of linear-form quadruples (one per k, since
/// coefficients may scale with k), packaged as records for growth_probe.
template <class FormsForK>
std::vector<CountRecord> linearform_records(FormsForK&& forms_for_k, std::span<const std::int64_t> ks,
                                            const std::string& label, const CountOptions& opts = {}) {
  std::vector<CountRecord> out;
  for (std::int64_t k : ks) {
    const std::array<LinearForm, 4> f = forms_for_k(k);
    out.push_back(make_count_record(PropertyTag::custom(label), 2, k,
                                    count_solutions_linearforms(f[0], f[1], f[2], f[3], k, opts)));
  }
  return out;
}

}  // namespace intmat
