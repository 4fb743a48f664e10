#pragma once

// Seeded Monte Carlo estimates for M_n(k) and the rescaled eigenvalue
// histograms of 2x2 matrices (delta = lambda / k on [-2, 2], area 2).
//
// Reproducibility key is (seed, workers): worker w draws from substream w of
// the seed and handles a fixed slice of the samples. Merges are integer sums.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intmat/count_record.hpp"
#include "intmat/exact_counts.hpp"
#include "intmat/integer.hpp"
#include "intmat/matrix.hpp"
#include "intmat/parallel.hpp"
#include "intmat/random.hpp"

namespace intmat {

struct SamplerConfig {
  int n = 2;
  std::int64_t k = 1;
  std::uint64_t samples = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("sampler needs n >= 1");
    if (k < 0) throw std::invalid_argument("sampler needs k >= 0");
    if (samples < 1) throw std::invalid_argument("sampler needs samples >= 1");
    if (workers < 1) throw std::invalid_argument("sampler needs workers >= 1");
  }
};

struct EstimateRecord {
  SamplerConfig config;
  std::string property;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string interval;  // "normal" or "wilson"
  std::string generator = Xoshiro256::kGeneratorId;
};

namespace detail {

template <class Rng>
void fill_entries(Rng& rng, std::int64_t k, std::vector<std::int64_t>& entries) {
  for (auto& e : entries) e = uniform_entry(rng, k);
}

}  // namespace detail

/// One matrix with independent uniform entries from {-k..k}.
template <class Rng>
IntMatrix sample_matrix(Rng& rng, int n, std::int64_t k) {
  if (n < 1 || k < 0) throw std::invalid_argument("sample_matrix needs n >= 1, k >= 0");
  std::vector<std::int64_t> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  detail::fill_entries(rng, k, e);
  if (k == 0) return IntMatrix(static_cast<std::size_t>(n), std::move(e));
  return IntMatrix(static_cast<std::size_t>(n), std::move(e), k);
}

inline constexpr double kZ95 = 1.959963984540054;

/// Normal-approximation 95% interval, switching to Wilson when either tail
/// has fewer than 30 observations.
inline void fill_interval(EstimateRecord& rec) {
  const auto n = static_cast<double>(rec.config.samples);
  const auto h = static_cast<double>(rec.hits);
  const double p = h / n;
  rec.p_hat = p;
  rec.std_error = std::sqrt(p * (1.0 - p) / n);
  if (rec.hits < 30 || rec.config.samples - rec.hits < 30) {
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    rec.ci_lo = center - half;
    rec.ci_hi = center + half;
    rec.interval = "wilson";
  } else {
    rec.ci_lo = p - kZ95 * rec.std_error;
    rec.ci_hi = p + kZ95 * rec.std_error;
    rec.interval = "normal";
  }
  rec.ci_lo = std::max(0.0, std::min(rec.ci_lo, p));
  rec.ci_hi = std::min(1.0, std::max(rec.ci_hi, p));
}

template <class Pred>
EstimateRecord estimate_probability(const SamplerConfig& config, const std::string& property, Pred&& pred) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(config.n);
  auto partial = run_workers(config.workers, [&](unsigned w) -> std::uint64_t {
    const Slice sl = slice_for(config.samples, config.workers, w);
    Xoshiro256 rng = Xoshiro256::substream(config.seed, w);
    IntMatrix scratch = config.k > 0 ? IntMatrix::zeros(n).with_bound(config.k) : IntMatrix::zeros(n);
    auto& e = detail::MatrixAccess::entries(scratch);
    std::uint64_t hits = 0;
    for (std::uint64_t i = sl.begin; i < sl.end; ++i) {
      detail::fill_entries(rng, config.k, e);
      if (pred(std::as_const(scratch))) ++hits;
    }
    return hits;
  });
  EstimateRecord rec;
  rec.config = config;
  rec.property = property;
  for (std::uint64_t h : partial) rec.hits += h;
  fill_interval(rec);
  return rec;
}

enum class SpectrumMode { integer_spectrum, real_spectrum };
enum class HistogramSource { exact, sampled };
enum class HistogramNormalization { half_eigenvalue_total, integer_matrix_count };

inline const char* to_string(SpectrumMode m) { return m == SpectrumMode::integer_spectrum ? "integer_spectrum" : "real_spectrum"; }
inline const char* to_string(HistogramSource s) { return s == HistogramSource::exact ? "exact" : "sampled"; }

/// Eigenvalue histogram over delta = lambda / k in [-2, 2], with half-open
/// bins [lo, hi) and the last bin closed at 2.
struct ScaledHistogram {
  std::int64_t k = 1;
  SpectrumMode mode = SpectrumMode::integer_spectrum;
  HistogramSource source = HistogramSource::exact;
  std::size_t bins = 100;
  double bin_width = 0.04;
  std::vector<std::uint64_t> weights;  // eigenvalues (exact: per-lambda matrix counts) per bin
  std::vector<double> density;
  BigRational normalizer;              // matrices the histogram is divided by
  std::uint64_t samples = 0;           // sampled source only
  std::uint64_t retained = 0;          // sampled source only

  double bin_lo(std::size_t i) const { return 4.0 * static_cast<double>(i) / static_cast<double>(bins) - 2.0; }
  double bin_hi(std::size_t i) const { return 4.0 * static_cast<double>(i + 1) / static_cast<double>(bins) - 2.0; }

  double area() const {
    double a = 0.0;
    for (double d : density) a += d * bin_width;
    return a;
  }

  /// Bin holding delta = 0.
  std::size_t zero_bin() const { return bin_of_lambda(0, 1); }

  /// Bin of the exact rational lambda/k: floor((lambda + 2k) * bins / 4k).
  std::size_t bin_of_lambda(std::int64_t lambda, std::int64_t scale) const {
    const Int128 num = static_cast<Int128>(lambda + 2 * scale) * static_cast<Int128>(bins);
    const Int128 den = 4 * static_cast<Int128>(scale);
    Int128 idx = num / den;
    if (idx < 0) idx = 0;
    if (idx >= static_cast<Int128>(bins)) idx = static_cast<Int128>(bins) - 1;
    return static_cast<std::size_t>(idx);
  }
};

/// Number of bins across [-2, 2] for a bin width that must divide 4.
inline std::size_t bins_for_width(double width) {
  if (!(width > 0.0) || width > 4.0) throw std::invalid_argument("bin width must be in (0, 4]");
  const double raw = 4.0 / width;
  const double rounded = std::round(raw);
  if (std::abs(rounded - raw) > 1e-9 * raw) throw std::invalid_argument("bin width must divide 4 evenly");
  return static_cast<std::size_t>(rounded);
}

namespace detail {

inline void finish_density(ScaledHistogram& h) {
  h.density.assign(h.bins, 0.0);
  const double norm = h.normalizer.convert_to<double>();
  if (norm <= 0.0) return;
  for (std::size_t i = 0; i < h.bins; ++i) h.density[i] = static_cast<double>(h.weights[i]) / (norm * h.bin_width);
}

}  // namespace detail

/// Exact integer-spectrum histogram of M_2(k): bin lambda/k weighted by
/// |M^lambda_2(k)|. Matrices with a repeated eigenvalue contribute once.
///
/// The default normalizer is half the eigenvalue total, which makes the area
/// exactly 2; integer_matrix_count divides by |M^Z_2(k)| instead.
inline ScaledHistogram eigenvalue_histogram_exact(
    std::int64_t k, std::size_t bins, HistogramNormalization norm = HistogramNormalization::half_eigenvalue_total,
    const CountOptions& opts = {}) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  ScaledHistogram h;
  h.k = k;
  h.mode = SpectrumMode::integer_spectrum;
  h.source = HistogramSource::exact;
  h.bins = bins;
  h.bin_width = 4.0 / static_cast<double>(bins);
  h.weights.assign(bins, 0);
  const std::vector<std::uint64_t> counts = lambda_eig_counts_2x2(k, opts);
  BigInt eigen_total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t lambda = static_cast<std::int64_t>(i) - 2 * k;
    h.weights[h.bin_of_lambda(lambda, k)] += counts[i];
    eigen_total += counts[i];
  }
  if (norm == HistogramNormalization::half_eigenvalue_total)
    h.normalizer = BigRational(eigen_total, 2);
  else
    h.normalizer = BigRational(count_integer_eig_2x2(k, opts).count);
  detail::finish_density(h);
  return h;
}

/// Sampled 2x2 histogram: every retained matrix (real or integer spectrum,
/// per mode) contributes both eigenvalues; the normalizer is the number of
/// retained matrices, so the area is 2.
inline ScaledHistogram eigenvalue_histogram_sampled(const SamplerConfig& config, SpectrumMode mode, std::size_t bins) {
  config.validate();
  if (config.n != 2) throw std::invalid_argument("sampled eigenvalue histograms need n = 2");
  if (config.k < 1 || config.k > (std::int64_t{1} << 30)) throw std::invalid_argument("histogram needs 1 <= k <= 2^30");
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  ScaledHistogram h;
  h.k = config.k;
  h.mode = mode;
  h.source = HistogramSource::sampled;
  h.bins = bins;
  h.bin_width = 4.0 / static_cast<double>(bins);
  h.samples = config.samples;
  const std::int64_t k = config.k;

  struct Partial {
    std::vector<std::uint64_t> weights;
    std::uint64_t retained = 0;
  };
  auto parts = run_workers(config.workers, [&](unsigned w) -> Partial {
    Partial out;
    out.weights.assign(bins, 0);
    const Slice sl = slice_for(config.samples, config.workers, w);
    Xoshiro256 rng = Xoshiro256::substream(config.seed, w);
    const double span = 4.0 * static_cast<double>(k);
    const auto real_bin = [&](double lambda) {
      double idx = std::floor((lambda + 2.0 * static_cast<double>(k)) * static_cast<double>(bins) / span);
      if (idx < 0.0) idx = 0.0;
      if (idx > static_cast<double>(bins - 1)) idx = static_cast<double>(bins - 1);
      return static_cast<std::size_t>(idx);
    };
    for (std::uint64_t i = sl.begin; i < sl.end; ++i) {
      const std::int64_t a = uniform_entry(rng, k), b = uniform_entry(rng, k);
      const std::int64_t c = uniform_entry(rng, k), d = uniform_entry(rng, k);
      const std::int64_t t = a + d;
      const std::int64_t disc = (a - d) * (a - d) + 4 * b * c;
      if (disc < 0) continue;
      if (mode == SpectrumMode::real_spectrum) {
        const double s = std::sqrt(static_cast<double>(disc));
        ++out.weights[real_bin((static_cast<double>(t) - s) / 2.0)];
        ++out.weights[real_bin((static_cast<double>(t) + s) / 2.0)];
      } else {
        const std::int64_t u = isqrt(disc);
        if (u * u != disc) continue;
        // t and u share parity, so both roots are integers
        ++out.weights[h.bin_of_lambda((t - u) / 2, k)];
        ++out.weights[h.bin_of_lambda((t + u) / 2, k)];
      }
      ++out.retained;
    }
    return out;
  });
  h.weights.assign(bins, 0);
  for (const Partial& p : parts) {
    h.retained += p.retained;
    for (std::size_t i = 0; i < bins; ++i) h.weights[i] += p.weights[i];
  }
  h.normalizer = BigRational(h.retained);
  detail::finish_density(h);
  return h;
}

}  // namespace intmat
