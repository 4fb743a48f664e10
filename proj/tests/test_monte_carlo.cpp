#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "intmat/asymptotics.hpp"
#include "intmat/monte_carlo.hpp"
#include "intmat/properties.hpp"
#include "oracles.hpp"

using namespace intmat;

TEST(Random, SplitMixReferenceOutputs) {
  SplitMix64 sm(1234567);
  EXPECT_EQ(sm.next(), 6457827717110365317ULL);
  EXPECT_EQ(sm.next(), 3203168211198807973ULL);
  EXPECT_EQ(sm.next(), 9817491932198370423ULL);
  EXPECT_EQ(sm.next(), 4593380528125082431ULL);
  EXPECT_EQ(sm.next(), 16408922859458223821ULL);
}

TEST(Random, XoshiroReferenceOutputs) {
  Xoshiro256 g = Xoshiro256::from_state({1, 2, 3, 4});
  EXPECT_EQ(g(), 11520ULL);
  EXPECT_EQ(g(), 0ULL);
  EXPECT_EQ(g(), 1509978240ULL);
  EXPECT_EQ(g(), 1215971899390074240ULL);
}

TEST(Random, JumpCommutesWithStepAndIsLinear) {
  // any power of the transition matrix commutes with a single step
  Xoshiro256 a(99), b(99);
  a();
  a.jump();
  b.jump();
  b();
  EXPECT_EQ(a.state(), b.state());

  const std::array<std::uint64_t, 4> x{0x0123456789abcdefULL, 7, 0xdeadbeefULL, 1ULL << 63};
  const std::array<std::uint64_t, 4> y{42, 0xfeedfaceULL, 3, 5};
  std::array<std::uint64_t, 4> xy{};
  for (int i = 0; i < 4; ++i) xy[i] = x[i] ^ y[i];
  Xoshiro256 gx = Xoshiro256::from_state(x), gy = Xoshiro256::from_state(y), gxy = Xoshiro256::from_state(xy);
  gx.jump();
  gy.jump();
  gxy.jump();
  for (int i = 0; i < 4; ++i) EXPECT_EQ(gxy.state()[i], gx.state()[i] ^ gy.state()[i]);
}

TEST(Random, SubstreamsAreJumpsOfTheBase) {
  Xoshiro256 base(5);
  EXPECT_EQ(Xoshiro256::substream(5, 0).state(), base.state());
  base.jump();
  EXPECT_EQ(Xoshiro256::substream(5, 1).state(), base.state());
  base.jump();
  EXPECT_EQ(Xoshiro256::substream(5, 2).state(), base.state());
  EXPECT_NE(Xoshiro256::substream(5, 1).state(), Xoshiro256::substream(6, 1).state());
}

TEST(Random, UniformEntryIsUnbiased) {
  Xoshiro256 rng(3);
  const std::int64_t k = 3;
  std::map<std::int64_t, int> hist;
  const int draws = 700000;
  for (int i = 0; i < draws; ++i) {
    const std::int64_t v = uniform_entry(rng, k);
    ASSERT_GE(v, -k);
    ASSERT_LE(v, k);
    ++hist[v];
  }
  ASSERT_EQ(hist.size(), 7u);
  double chi2 = 0.0;
  const double expect = draws / 7.0;
  for (const auto& [v, c] : hist) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_LT(chi2, 22.46);  // 6 dof, p = 0.001
  EXPECT_THROW(uniform_below(rng, 0), std::invalid_argument);
  EXPECT_EQ(uniform_below(rng, 1), 0u);
}

TEST(Interval, NormalAndWilson) {
  EstimateRecord r;
  r.config.samples = 10000;
  r.hits = 2500;
  fill_interval(r);
  EXPECT_EQ(r.interval, "normal");
  EXPECT_DOUBLE_EQ(r.p_hat, 0.25);
  EXPECT_NEAR(r.std_error, std::sqrt(0.25 * 0.75 / 10000), 1e-15);
  EXPECT_NEAR(r.ci_lo, 0.25 - kZ95 * r.std_error, 1e-15);
  EXPECT_NEAR(r.ci_hi, 0.25 + kZ95 * r.std_error, 1e-15);

  r.hits = 0;
  fill_interval(r);
  EXPECT_EQ(r.interval, "wilson");
  EXPECT_EQ(r.ci_lo, 0.0);
  // Wilson upper bound at 0 successes: z^2 / (n + z^2)
  EXPECT_NEAR(r.ci_hi, kZ95 * kZ95 / (10000 + kZ95 * kZ95), 1e-12);

  r.hits = 10000;
  fill_interval(r);
  EXPECT_EQ(r.interval, "wilson");
  EXPECT_EQ(r.ci_hi, 1.0);
  EXPECT_EQ(r.p_hat, 1.0);
}

TEST(Estimate, AlwaysIsOne) {
  const SamplerConfig cfg{3, 4, 5000, 1, 2};
  const auto r = estimate_probability(cfg, "always", predicate_for(PropertyTag::custom("always")));
  EXPECT_EQ(r.hits, 5000u);
  EXPECT_EQ(r.p_hat, 1.0);
}

TEST(Estimate, ReproducibleForSeedAndWorkers) {
  for (unsigned w : {1u, 3u}) {
    const SamplerConfig cfg{2, 10, 40000, 77, w};
    const auto a = estimate_probability(cfg, "singular", is_singular);
    const auto b = estimate_probability(cfg, "singular", is_singular);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.ci_lo, b.ci_lo);
  }
  const SamplerConfig c1{2, 10, 40000, 77, 1}, c2{2, 10, 40000, 78, 1};
  EXPECT_NE(estimate_probability(c1, "singular", is_singular).hits,
            estimate_probability(c2, "singular", is_singular).hits);
}

TEST(Estimate, SingleWorkerStreamIsTheSeedStream) {
  // one worker draws entries in order from substream 0
  const SamplerConfig cfg{2, 3, 2000, 11, 1};
  Xoshiro256 rng(11);
  std::uint64_t hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const IntMatrix m = oracle::random_matrix(rng, 2, 3);
    if (m(0, 0) * m(1, 1) == m(0, 1) * m(1, 0)) ++hits;
  }
  EXPECT_EQ(estimate_probability(cfg, "singular", is_singular).hits, hits);
}

TEST(Estimate, CoversExactProbability) {
  // 289 / 7^4 singular matrices at k = 3
  const double exact = 289.0 / 2401.0;
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SamplerConfig cfg{2, 3, 20000, seed, 2};
    const auto r = estimate_probability(cfg, "singular", is_singular);
    if (r.ci_lo <= exact && exact <= r.ci_hi) ++covered;
  }
  EXPECT_GE(covered, 33);  // expected 38; binomial tail below 33 is < 0.2%
}

TEST(Estimate, RejectsBadConfig) {
  EXPECT_THROW(estimate_probability(SamplerConfig{0, 1, 1, 0, 1}, "x", is_singular), std::invalid_argument);
  EXPECT_THROW(estimate_probability(SamplerConfig{2, 1, 0, 0, 1}, "x", is_singular), std::invalid_argument);
  EXPECT_THROW(estimate_probability(SamplerConfig{2, 1, 1, 0, 0}, "x", is_singular), std::invalid_argument);
}

TEST(SampleMatrix, EntriesInRange) {
  Xoshiro256 rng(8);
  for (int i = 0; i < 100; ++i) {
    const IntMatrix m = sample_matrix(rng, 4, 6);
    EXPECT_EQ(m.bound(), 6);
    EXPECT_LE(max_abs_entry(m), 6);
  }
}

TEST(Histogram, BinIndexing) {
  ScaledHistogram h;
  h.bins = 100;
  const std::int64_t k = 50;
  EXPECT_EQ(h.bin_of_lambda(-2 * k, k), 0u);
  EXPECT_EQ(h.bin_of_lambda(2 * k, k), 99u);  // last bin is closed
  EXPECT_EQ(h.bin_of_lambda(0, k), 50u);
  EXPECT_EQ(h.bin_of_lambda(-1, k), 49u);
  EXPECT_EQ(h.bin_of_lambda(1, k), 50u);  // 1/50 = 0.02 < 0.04
  EXPECT_EQ(h.bin_of_lambda(2, k), 51u);  // 0.04 opens the next bin
  EXPECT_EQ(h.zero_bin(), 50u);
  EXPECT_DOUBLE_EQ(h.bin_lo(0), -2.0);
  EXPECT_DOUBLE_EQ(h.bin_hi(99), 2.0);
  EXPECT_EQ(bins_for_width(0.04), 100u);
  EXPECT_THROW(bins_for_width(0.03), std::invalid_argument);
  EXPECT_THROW(bins_for_width(0.0), std::invalid_argument);
}

TEST(Histogram, ExactWeightsMatchEnumeration) {
  const std::int64_t k = 4;
  const std::size_t bins = 16;
  const ScaledHistogram h = eigenvalue_histogram_exact(k, bins);
  std::vector<std::uint64_t> want(bins, 0);
  std::uint64_t eigen_total = 0, integer_matrices = 0;
  for (std::int64_t a = -k; a <= k; ++a)
    for (std::int64_t b = -k; b <= k; ++b)
      for (std::int64_t c = -k; c <= k; ++c)
        for (std::int64_t d = -k; d <= k; ++d) {
          const auto roots = oracle::quadratic_integer_roots(a, b, c, d);
          if (!roots.empty()) ++integer_matrices;
          for (std::int64_t r : roots) {
            const double delta = static_cast<double>(r) / static_cast<double>(k);
            std::size_t idx = static_cast<std::size_t>(std::floor((delta + 2.0) / 4.0 * static_cast<double>(bins)));
            if (idx >= bins) idx = bins - 1;
            ++want[idx];
            ++eigen_total;
          }
        }
  EXPECT_EQ(h.weights, want);
  EXPECT_EQ(h.normalizer, BigRational(eigen_total, 2));
  EXPECT_NEAR(h.area(), 2.0, 1e-12);

  const ScaledHistogram by_count = eigenvalue_histogram_exact(k, bins, HistogramNormalization::integer_matrix_count);
  EXPECT_EQ(by_count.normalizer, BigRational(integer_matrices));
  EXPECT_LT(by_count.area(), 2.0);  // matrices with a double eigenvalue count once
}

TEST(Histogram, ExactIsSymmetricWithAreaTwo) {
  for (std::int64_t k : {10, 37}) {
    const ScaledHistogram h = eigenvalue_histogram_exact(k, 50);
    EXPECT_NEAR(h.area(), 2.0, 1e-12);
    // bins are half-open, so reflection pairs lambda with -lambda only for
    // weights that avoid the edges; compare the per-lambda counts instead
    const auto counts = lambda_eig_counts_2x2(k);
    for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_EQ(counts[i], counts[counts.size() - 1 - i]);
  }
  // bins with no lambda/k on an edge are exactly symmetric
  const ScaledHistogram h = eigenvalue_histogram_exact(25, 40);  // width 0.1, lambda/k on 0.04 grid
  for (std::size_t i = 0; i < 40; ++i) {
    bool edge = false;
    for (std::int64_t lambda = -50; lambda <= 50; ++lambda) {
      const double d = static_cast<double>(lambda) / 25.0;
      if (std::abs(d - h.bin_lo(i)) < 1e-12 || std::abs(d - h.bin_hi(i)) < 1e-12) edge = true;
    }
    const std::size_t j = 39 - i;
    bool edge_j = false;
    for (std::int64_t lambda = -50; lambda <= 50; ++lambda) {
      const double d = static_cast<double>(lambda) / 25.0;
      if (std::abs(d - h.bin_lo(j)) < 1e-12 || std::abs(d - h.bin_hi(j)) < 1e-12) edge_j = true;
    }
    if (!edge && !edge_j) {
      EXPECT_EQ(h.weights[i], h.weights[j]) << i;
    }
  }
}

TEST(Histogram, SampledIntegerTracksExact) {
  const std::int64_t k = 20;
  const ScaledHistogram exact = eigenvalue_histogram_exact(k, 20);
  const ScaledHistogram sampled =
      eigenvalue_histogram_sampled(SamplerConfig{2, k, 400000, 9, 2}, SpectrumMode::integer_spectrum, 20);
  EXPECT_NEAR(sampled.area(), 2.0, 1e-12);
  EXPECT_GT(sampled.retained, 0u);
  EXPECT_EQ(sampled.normalizer, BigRational(sampled.retained));
  double l1 = 0.0;
  for (std::size_t i = 0; i < 20; ++i) l1 += std::abs(exact.density[i] - sampled.density[i]) * exact.bin_width;
  EXPECT_LT(l1, 0.06);
}

TEST(Histogram, SampledRealMatchesRealFraction) {
  const std::int64_t k = 30;
  const SamplerConfig cfg{2, k, 300000, 4, 3};
  const ScaledHistogram h = eigenvalue_histogram_sampled(cfg, SpectrumMode::real_spectrum, 40);
  const double p = count_real_eig_2x2(k).probability;
  const double frac = static_cast<double>(h.retained) / static_cast<double>(cfg.samples);
  EXPECT_NEAR(frac, p, 5.0 * std::sqrt(p * (1 - p) / cfg.samples));
  EXPECT_NEAR(h.area(), 2.0, 1e-12);
  const auto again = eigenvalue_histogram_sampled(cfg, SpectrumMode::real_spectrum, 40);
  EXPECT_EQ(again.weights, h.weights);
}

TEST(Histogram, SampledRejectsBadInput) {
  EXPECT_THROW(eigenvalue_histogram_sampled(SamplerConfig{3, 5, 10, 1, 1}, SpectrumMode::real_spectrum, 10),
               std::invalid_argument);
  EXPECT_THROW(eigenvalue_histogram_sampled(SamplerConfig{2, 5, 10, 1, 1}, SpectrumMode::real_spectrum, 0),
               std::invalid_argument);
}
