#pragma once

// intmat command-line front end. run_cli is kept separate from main so the
// test suite can drive it in-process.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "intmat/intmat.hpp"

namespace intmat::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kBudget = 3 };

/// Usage errors detected after parsing (bad combinations of options).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string rational_string(const BigRational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt den = denominator(r);
  if (den == 1) return to_string(BigInt(numerator(r)));
  return to_string(BigInt(numerator(r))) + "/" + to_string(den);
}

struct Common {
  std::string format = "csv";
  unsigned workers = default_workers();
  bool timestamp = false;
};

inline Json budgets_json(const Budgets& b) {
  return Json{{"brute_force_matrices", b.brute_force_matrices},
              {"max_k_singular", b.max_k_singular},
              {"max_k_real", b.max_k_real},
              {"max_k_integer", b.max_k_integer},
              {"memory_mb", b.memory_bytes >> 20}};
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline Json manifest(const std::string& subcommand, Json params, const Common& common, const Budgets& budgets) {
  Json m;
  m["subcommand"] = subcommand;
  m["params"] = std::move(params);
  m["workers"] = common.workers;
  m["budgets"] = budgets_json(budgets);
  m["version"] = kVersion;
  m["generator"] = Xoshiro256::kGeneratorId;
  if (common.timestamp) m["timestamp"] = utc_now();
  return m;
}

inline Json document(const Json& manifest_json) {
  Json d;
  d["schema"] = kSchema;
  d["manifest"] = manifest_json;
  return d;
}

inline void csv_manifest(std::ostream& out, const Json& m) { out << "# manifest: " << m.dump() << '\n'; }

inline PropertyTag parse_property(const std::string& name, std::int64_t lambda, bool allow_always) {
  if (name == "singular") return PropertyTag::singular();
  if (name == "integer-eig") return PropertyTag::integer_eig();
  if (name == "real-eig") return PropertyTag::real_eig();
  if (name == "lambda-eig") return PropertyTag::lambda_eig(lambda);
  if (allow_always && name == "always") return PropertyTag::custom("always");
  throw UsageError("unknown property '" + name + "'");
}

// ---------------------------------------------------------------- count

struct CountArgs {
  std::string property;
  int n = 2;
  std::vector<std::int64_t> ks;
  std::optional<std::int64_t> lambda;
};

inline CountRecord count_one(const PropertyTag& tag, int n, std::int64_t k, const CountOptions& opts) {
  if (n == 2) {
    switch (tag.kind) {
      case Property::singular: return count_singular_2x2(k, opts);
      case Property::integer_eig: return count_integer_eig_2x2(k, opts);
      case Property::real_eig: return count_real_eig_2x2(k, opts);
      case Property::lambda_eig: return count_lambda_eig_2x2(k, tag.lambda, opts);
      case Property::custom: break;
    }
  }
  if (tag.kind == Property::lambda_eig && std::abs(tag.lambda) > static_cast<std::int64_t>(n) * k)
    return make_count_record(tag, n, k, 0);
  return brute_force_count(n, k, tag, predicate_for(tag), opts);
}

inline int cmd_count(const CountArgs& a, const Common& common, std::ostream& out) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  if (a.ks.empty()) throw UsageError("one of --k or --k-grid is required");
  for (std::int64_t k : a.ks)
    if (k < 1) throw UsageError("k must be >= 1");
  if (a.property == "lambda-eig" && !a.lambda) throw UsageError("--lambda is required for lambda-eig");
  const PropertyTag tag = parse_property(a.property, a.lambda.value_or(0), false);
  if (tag.kind == Property::real_eig && a.n != 2) throw UsageError("real-eig is defined for n = 2 only");

  CountOptions opts;
  opts.workers = common.workers;
  Json params{{"property", a.property}, {"n", a.n}, {"k", a.ks}};
  if (a.lambda) params["lambda"] = *a.lambda;
  const Json m = manifest("count", params, common, opts.budgets);

  std::vector<CountRecord> records;
  for (std::int64_t k : a.ks) records.push_back(count_one(tag, a.n, k, opts));

  if (common.format == "json") {
    Json d = document(m);
    d["records"] = Json::array();
    for (const auto& r : records) {
      Json row{{"property", r.property.name()}, {"n", r.n}, {"k", r.k}};
      if (r.property.kind == Property::lambda_eig) row["lambda"] = r.property.lambda;
      row["count"] = to_string(r.count);
      row["total"] = to_string(r.total);
      row["probability"] = r.probability;
      row["probability_exact"] = rational_string(r.probability_exact);
      d["records"].push_back(row);
    }
    out << d.dump(2) << '\n';
  } else {
    csv_manifest(out, m);
    out << "property,n,k,count,total,probability\n";
    for (const auto& r : records)
      out << r.property.name() << ',' << r.n << ',' << r.k << ',' << to_string(r.count) << ',' << to_string(r.total)
          << ',' << fmt(r.probability) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string property;
  int n = 2;
  std::int64_t k = 0;
  std::uint64_t samples = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> lambda;
};

inline int cmd_estimate(const EstimateArgs& a, const Common& common, std::ostream& out) {
  if (!a.seed) throw UsageError("--seed is required for randomized commands");
  if (a.n < 1 || a.k < 1 || a.samples < 1) throw UsageError("--n, --k and --samples must be >= 1");
  if (a.property == "lambda-eig" && !a.lambda) throw UsageError("--lambda is required for lambda-eig");
  const PropertyTag tag = parse_property(a.property, a.lambda.value_or(0), true);
  if (tag.kind == Property::real_eig && a.n != 2) throw UsageError("real-eig is defined for n = 2 only");

  SamplerConfig cfg{a.n, a.k, a.samples, *a.seed, common.workers};
  Json params{{"property", a.property}, {"n", a.n}, {"k", a.k}, {"samples", a.samples}, {"seed", *a.seed}};
  if (a.lambda) params["lambda"] = *a.lambda;
  const Json m = manifest("estimate", params, common, Budgets::from_environment());

  const EstimateRecord r = estimate_probability(cfg, tag.name(), predicate_for(tag));
  if (common.format == "json") {
    Json d = document(m);
    d["estimate"] = Json{{"property", r.property},       {"n", cfg.n},
                         {"k", cfg.k},                   {"samples", cfg.samples},
                         {"hits", r.hits},               {"p_hat", r.p_hat},
                         {"stderr", r.std_error}, {"ci_lo", r.ci_lo},
                         {"ci_hi", r.ci_hi}, {"interval", r.interval},
                         {"seed", cfg.seed},             {"workers", cfg.workers},
                         {"generator", r.generator}};
    out << d.dump(2) << '\n';
  } else {
    csv_manifest(out, m);
    out << "property,n,k,samples,hits,p_hat,stderr,ci_lo,ci_hi,interval,seed,workers,generator\n";
    out << r.property << ',' << cfg.n << ',' << cfg.k << ',' << cfg.samples << ',' << r.hits << ',' << fmt(r.p_hat)
        << ',' << fmt(r.std_error) << ',' << fmt(r.ci_lo) << ',' << fmt(r.ci_hi) << ',' << r.interval << ','
        << cfg.seed << ',' << cfg.workers << ',' << r.generator << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- hist

struct HistArgs {
  std::string mode = "integer";
  std::string source = "exact";
  std::string normalization = "half-total";
  int n = 2;
  std::int64_t k = 0;
  std::optional<std::size_t> bins;
  std::optional<double> bin_width;
  std::uint64_t samples = 1000000;
  std::optional<std::uint64_t> seed;
};

inline std::size_t resolve_bins(const std::optional<std::size_t>& bins, const std::optional<double>& width) {
  if (bins && width) throw UsageError("give --bins or --bin-width, not both");
  if (width) {
    try {
      return bins_for_width(*width);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const std::size_t b = bins.value_or(100);
  if (b < 1) throw UsageError("--bins must be >= 1");
  return b;
}

inline ScaledHistogram build_histogram(const std::string& mode, const std::string& source, const std::string& norm,
                                       int n, std::int64_t k, std::size_t bins, std::uint64_t samples,
                                       const std::optional<std::uint64_t>& seed, unsigned workers) {
  if (mode != "integer" && mode != "real") throw UsageError("--mode must be integer or real");
  if (source != "exact" && source != "sampled") throw UsageError("--source must be exact or sampled");
  if (n != 2) throw UsageError("eigenvalue histograms are defined for n = 2 only");
  if (k < 1) throw UsageError("--k must be >= 1");
  if (source == "exact") {
    if (mode == "real") throw UsageError("real-spectrum histograms are available from --source sampled only");
    if (norm != "half-total" && norm != "integer-count")
      throw UsageError("--normalization must be half-total or integer-count");
    CountOptions opts;
    opts.workers = workers;
    return eigenvalue_histogram_exact(k, bins,
                                      norm == "half-total" ? HistogramNormalization::half_eigenvalue_total
                                                           : HistogramNormalization::integer_matrix_count,
                                      opts);
  }
  if (!seed) throw UsageError("--seed is required for randomized commands");
  if (samples < 1) throw UsageError("--samples must be >= 1");
  const SamplerConfig cfg{2, k, samples, *seed, workers};
  return eigenvalue_histogram_sampled(cfg, mode == "integer" ? SpectrumMode::integer_spectrum : SpectrumMode::real_spectrum,
                                      bins);
}

inline int cmd_hist(const HistArgs& a, const Common& common, std::ostream& out) {
  const std::size_t bins = resolve_bins(a.bins, a.bin_width);
  Json params{{"mode", a.mode}, {"source", a.source}, {"n", a.n}, {"k", a.k}, {"bins", bins}};
  if (a.source == "exact") params["normalization"] = a.normalization;
  if (a.source == "sampled") {
    params["samples"] = a.samples;
    if (a.seed) params["seed"] = *a.seed;
  }
  const ScaledHistogram h =
      build_histogram(a.mode, a.source, a.normalization, a.n, a.k, bins, a.samples, a.seed, common.workers);
  const Json m = manifest("hist", params, common, Budgets::from_environment());
  if (common.format == "json") {
    Json d = document(m);
    Json rows = Json::array();
    for (std::size_t i = 0; i < h.bins; ++i)
      rows.push_back(Json{{"delta_lo", h.bin_lo(i)}, {"delta_hi", h.bin_hi(i)}, {"density", h.density[i]}});
    d["bins"] = rows;
    d["normalizer"] = rational_string(h.normalizer);
    d["area"] = h.area();
    if (h.source == HistogramSource::sampled) d["retained"] = h.retained;
    out << d.dump(2) << '\n';
  } else {
    csv_manifest(out, m);
    out << "delta_lo,delta_hi,density\n";
    for (std::size_t i = 0; i < h.bins; ++i)
      out << fmt(h.bin_lo(i)) << ',' << fmt(h.bin_hi(i)) << ',' << fmt(h.density[i]) << '\n';
    out << "# normalizer=" << rational_string(h.normalizer) << " area=" << fmt(h.area(), "%.6f") << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- curve

inline int cmd_curve(double step, const Common& common, std::ostream& out) {
  std::vector<double> grid;
  try {
    grid = curve_grid(step);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Json m = manifest("curve", Json{{"step", step}}, common, Budgets::from_environment());
  if (common.format == "json") {
    Json d = document(m);
    d["rows"] = Json::array();
    for (double x : grid)
      d["rows"].push_back(Json{{"delta", x},
                               {"u_z", integer_limit_density(x)},
                               {"u_r", real_limit_density(x)}});
    out << d.dump(2) << '\n';
  } else {
    csv_manifest(out, m);
    out << "delta,u_z,u_r\n";
    for (double x : grid) out << fmt(x) << ',' << fmt(integer_limit_density(x)) << ',' << fmt(real_limit_density(x)) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct SuiteResult {
  explicit SuiteResult(std::string suite) : name(std::move(suite)) {}

  std::string name;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> counterexamples;  // first few only
  Json diagnostics = Json::object();         // reported, never gated

  void check(bool ok, const std::function<std::string()>& describe) {
    ++checks;
    if (ok) return;
    ++failures;
    if (counterexamples.size() < 5) counterexamples.push_back(describe());
  }
  bool passed() const { return failures == 0; }
};

inline std::string matrix_string(const IntMatrix& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

struct VerifyArgs {
  std::string suite;
  std::optional<int> n;
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::int64_t k = 10;
  std::int64_t k_max = 15;
};

// Adversarial inputs for the cofactor identity: zero rows, repeated rows,
// singular trailing block.
inline std::vector<IntMatrix> identity_edge_cases(std::size_t n, std::int64_t k, Xoshiro256& rng) {
  std::vector<IntMatrix> out;
  auto random = [&] {
    std::vector<std::int64_t> e(n * n);
    for (auto& v : e) v = uniform_entry(rng, k);
    return e;
  };
  out.push_back(IntMatrix::zeros(n));
  out.push_back(IntMatrix::filled(n, k));
  for (std::size_t r = 0; r < n; ++r) {
    auto e = random();
    for (std::size_t c = 0; c < n; ++c) e[r * n + c] = 0;
    out.emplace_back(n, e);
  }
  for (std::size_t r = 1; r < n; ++r) {
    auto e = random();
    for (std::size_t c = 0; c < n; ++c) e[r * n + c] = e[c];
    out.emplace_back(n, e);
  }
  {
    // trailing block with two equal rows (or zero when it is 1x1)
    auto e = random();
    if (n == 3) {
      e[8] = 0;
    } else {
      for (std::size_t c = 2; c < n; ++c) e[3 * n + c] = e[2 * n + c];
    }
    out.emplace_back(n, e);
  }
  return out;
}

inline SuiteResult verify_identity(const VerifyArgs& a) {
  SuiteResult res{"identity"};
  std::vector<int> dims;
  if (a.n) dims = {*a.n};
  else dims = {3, 4, 5, 6};
  for (int n : dims) {
    if (n < 3) throw UsageError("identity suite needs --n >= 3");
    Xoshiro256 rng = Xoshiro256::substream(*a.seed, static_cast<std::uint64_t>(n));
    auto test = [&](const IntMatrix& m) {
      const auto sides = adjugate_identity_sides(m);
      res.check(sides.holds(), [&] {
        return "identity fails for " + matrix_string(m) + ": a11*a22 - a12*a21 = " + to_string(sides.cofactor_minor) +
               ", det(M)*det(Z) = " + to_string(sides.det_product);
      });
    };
    for (const IntMatrix& m : identity_edge_cases(static_cast<std::size_t>(n), a.k, rng)) test(m);
    for (std::uint64_t t = 0; t < a.trials; ++t) test(sample_matrix(rng, n, a.k));
  }
  return res;
}

inline SuiteResult verify_gershgorin(const VerifyArgs& a) {
  SuiteResult res{"gershgorin"};
  std::vector<int> dims;
  if (a.n) dims = {*a.n};
  else dims = {2, 3, 4, 5, 6};
  for (int n : dims) {
    if (n < 1) throw UsageError("--n must be >= 1");
    const std::int64_t nk = static_cast<std::int64_t>(n) * a.k;
    const IntMatrix all_k = IntMatrix::filled(static_cast<std::size_t>(n), a.k);
    const auto eig = integer_eigenvalues(all_k);
    res.check(std::find(eig.begin(), eig.end(), nk) != eig.end(),
              [&] { return "all-k matrix misses eigenvalue nk = " + std::to_string(nk) + ": " + matrix_string(all_k); });
    Xoshiro256 rng = Xoshiro256::substream(*a.seed, static_cast<std::uint64_t>(n));
    for (std::uint64_t t = 0; t < a.trials; ++t) {
      const IntMatrix m = sample_matrix(rng, n, a.k);
      const auto disks = gershgorin_disks(m);
      for (std::int64_t lambda : integer_eigenvalues(m)) {
        res.check(lambda >= -nk && lambda <= nk && in_disk_union(disks, lambda) && has_eigenvalue(m, lambda), [&] {
          return "eigenvalue " + std::to_string(lambda) + " outside [-nk, nk] or the disks for " + matrix_string(m);
        });
      }
    }
  }
  return res;
}

// Fast 2x2 counters against one exhaustive pass per k that evaluates every
// property directly from (a, b, c, d).
inline SuiteResult verify_oracle(const VerifyArgs& a, unsigned workers) {
  SuiteResult res{"oracle"};
  if (a.k_max < 1) throw UsageError("--k-max must be >= 1");
  CountOptions opts;
  opts.workers = workers;
  for (std::int64_t k = 1; k <= a.k_max; ++k) {
    std::uint64_t singular = 0, integer = 0, real = 0;
    std::vector<std::uint64_t> lambda(static_cast<std::size_t>(4 * k + 1), 0);
    for (std::int64_t p = -k; p <= k; ++p)
      for (std::int64_t q = -k; q <= k; ++q)
        for (std::int64_t r = -k; r <= k; ++r)
          for (std::int64_t s = -k; s <= k; ++s) {
            if (p * s == q * r) ++singular;
            const std::int64_t disc = (p - s) * (p - s) + 4 * q * r;
            if (disc < 0) continue;
            ++real;
            const std::int64_t u = isqrt(disc);
            if (u * u != disc) continue;
            ++integer;
            const std::int64_t lo = (p + s - u) / 2, hi = (p + s + u) / 2;
            ++lambda[static_cast<std::size_t>(lo + 2 * k)];
            if (hi != lo) ++lambda[static_cast<std::size_t>(hi + 2 * k)];
          }
    auto compare = [&](const char* what, const BigInt& fast, std::uint64_t brute) {
      res.check(fast == brute, [&] {
        return std::string(what) + " at k = " + std::to_string(k) + ": fast " + to_string(fast) + " vs brute force " +
               std::to_string(brute);
      });
    };
    compare("singular", count_singular_2x2(k, opts).count, singular);
    compare("integer-eig", count_integer_eig_2x2(k, opts).count, integer);
    compare("real-eig", count_real_eig_2x2(k, opts).count, real);
    const auto fast = lambda_eig_counts_2x2(k, opts);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const std::string what = "lambda-eig(" + std::to_string(static_cast<std::int64_t>(i) - 2 * k) + ")";
      compare(what.c_str(), BigInt(fast[i]), lambda[i]);
    }
  }
  return res;
}

inline SuiteResult verify_curves() {
  SuiteResult res{"curves"};
  using std::numbers::sqrt2;
  auto near = [&](const std::string& what, double got, double want, double tol) {
    res.check(std::abs(got - want) <= tol, [&] {
      return what + ": got " + fmt(got, "%.17g") + ", expected " + fmt(want, "%.17g") + " (tol " + fmt(tol) + ")";
    });
  };
  near("V(0)", integer_profile(0.0), 4.0, 1e-15);
  near("V(2)", integer_profile(2.0), 0.0, 1e-15);
  near("W(2)", real_profile(2.0), 0.0, 1e-15);
  near("V join at sqrt2", profile_piece::integer_inner(sqrt2), profile_piece::integer_outer(sqrt2), 1e-12);
  near("W join at 1 (left)", profile_piece::real_inner(1.0), 15.0 / 32.0, 1e-12);
  near("W join at 1 (right)", profile_piece::real_middle(1.0), 15.0 / 32.0, 1e-12);
  near("W join at sqrt2", profile_piece::real_middle(sqrt2), profile_piece::real_outer(sqrt2), 1e-12);
  near("alpha", theory_constants().alpha, 0.272008, 5e-7);
  near("area U_Z", integrate_curve(CurveId::integer_density, -2.0, 2.0, 1e-10), 2.0, 1e-6);
  near("area U_R", integrate_curve(CurveId::real_density, -2.0, 2.0, 1e-10), 2.0, 1e-6);
  for (double x : curve_grid(0.001)) {
    const double dz = integer_limit_density(x) - integer_limit_density(-x);
    const double dr = real_limit_density(x) - real_limit_density(-x);
    res.check(dz == 0.0 && dr == 0.0, [&] { return "curves not even at delta = " + fmt(x); });
    res.check(integer_limit_density(x) >= -1e-12 && real_limit_density(x) >= -1e-12,
              [&] { return "negative density at delta = " + fmt(x); });
  }
  double best_z = -1.0, arg_z = 0.0, best_r = -1.0, arg_r = 0.0;
  for (double x : curve_grid(0.001)) {
    if (integer_limit_density(x) > best_z) best_z = integer_limit_density(x), arg_z = x;
    if (real_limit_density(x) > best_r) best_r = real_limit_density(x), arg_r = x;
  }
  res.check(arg_z == 0.0, [&] { return "U_Z argmax at delta = " + fmt(arg_z) + ", expected 0"; });
  res.check(std::abs(arg_r) >= 0.70 && std::abs(arg_r) <= 0.80,
            [&] { return "U_R argmax at delta = " + fmt(arg_r) + ", expected |delta| in [0.70, 0.80]"; });
  Json slopes = Json::array();
  for (CurveId id : {CurveId::integer_profile, CurveId::real_profile})
    for (double b : curve_breakpoints()) {
      if (b <= 0.0 || b >= 2.0) continue;
      const auto [left, right] = one_sided_slopes(id, b);
      slopes.push_back(Json{{"curve", to_string(id)}, {"delta", b}, {"left", left}, {"right", right}});
    }
  res.diagnostics["one_sided_slopes"] = slopes;
  return res;
}

/// Human-readable lines to err, JSON summary to out; exit 2 on any failure.
inline int render_suites(const std::vector<SuiteResult>& results, const Json& m, std::ostream& out, std::ostream& err) {
  Json d = document(m);
  d["suites"] = Json::array();
  bool ok = true;
  for (const auto& r : results) {
    err << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.checks - r.failures << "/" << r.checks
        << " checks passed\n";
    for (const auto& c : r.counterexamples) err << "  counterexample: " << c << '\n';
    d["suites"].push_back(Json{{"name", r.name},
                               {"checks", r.checks},
                               {"failures", r.failures},
                               {"passed", r.passed()},
                               {"counterexamples", r.counterexamples}});
    if (!r.diagnostics.empty()) d["suites"].back()["diagnostics"] = r.diagnostics;
    ok = ok && r.passed();
  }
  d["passed"] = ok;
  out << d.dump(2) << '\n';
  return ok ? kOk : kVerifyFailed;
}

inline int cmd_verify(const VerifyArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kSuites{"identity", "gershgorin", "oracle", "curves", "all"};
  if (std::find(kSuites.begin(), kSuites.end(), a.suite) == kSuites.end())
    throw UsageError("unknown suite '" + a.suite + "'");
  const bool randomized = a.suite == "identity" || a.suite == "gershgorin" || a.suite == "all";
  if (randomized && !a.seed) throw UsageError("--seed is required for randomized commands");
  if (a.k < 1) throw UsageError("--k must be >= 1");

  Json params{{"suite", a.suite}, {"trials", a.trials}, {"k", a.k}, {"k_max", a.k_max}};
  if (a.n) params["n"] = *a.n;
  if (a.seed) params["seed"] = *a.seed;
  const Json m = manifest("verify", params, common, Budgets::from_environment());

  std::vector<SuiteResult> results;
  const bool all = a.suite == "all";
  if (all || a.suite == "identity") results.push_back(verify_identity(a));
  if (all || a.suite == "gershgorin") results.push_back(verify_gershgorin(a));
  if (all || a.suite == "oracle") results.push_back(verify_oracle(a, common.workers));
  if (all || a.suite == "curves") results.push_back(verify_curves());

  return render_suites(results, m, out, err);
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string target;
  std::vector<std::int64_t> ks;
  std::string mode = "integer";
  std::string source = "exact";
  std::size_t bins = 100;
  std::uint64_t samples = 1000000;
  std::optional<std::uint64_t> seed;
};

inline int cmd_report(const ReportArgs& a, const Common& common, std::ostream& out) {
  if (a.ks.size() < 2) throw UsageError("report needs a --k-grid of at least 2 values");
  for (std::size_t i = 0; i < a.ks.size(); ++i) {
    if (a.ks[i] < 2) throw UsageError("report needs k >= 2");
    if (i > 0 && a.ks[i] <= a.ks[i - 1]) throw UsageError("--k-grid must be strictly increasing");
  }
  CountOptions opts;
  opts.workers = common.workers;
  Json params{{"target", a.target}, {"k", a.ks}};
  ConvergenceReport rep;
  if (a.target == "singular" || a.target == "integer-eig") {
    std::vector<CountRecord> recs;
    for (std::int64_t k : a.ks) recs.push_back(a.target == "singular" ? count_singular_2x2(k, opts) : count_integer_eig_2x2(k, opts));
    rep = convergence_report(recs, a.target == "singular" ? ReportTarget::singular : ReportTarget::integer_eig);
  } else if (a.target == "histogram") {
    params["mode"] = a.mode;
    params["source"] = a.source;
    params["bins"] = a.bins;
    if (a.source == "sampled") {
      params["samples"] = a.samples;
      if (a.seed) params["seed"] = *a.seed;
    }
    if (a.bins < 1) throw UsageError("--bins must be >= 1");
    std::vector<ScaledHistogram> hs;
    for (std::int64_t k : a.ks)
      hs.push_back(build_histogram(a.mode, a.source, "half-total", 2, k, a.bins, a.samples, a.seed, common.workers));
    rep = convergence_report(hs);
  } else {
    throw UsageError("--target must be singular, integer-eig or histogram");
  }
  const Json m = manifest("report", params, common, opts.budgets);
  Json d = document(m);
  Json r;
  r["target"] = to_string(rep.target);
  r["property"] = rep.property;
  r["source"] = rep.source;
  r["normalization"] = rep.normalization;
  r["criterion"] = rep.criterion;
  r["rows"] = Json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    Json jr{{"k", row.k},
            {"empirical", row.empirical},
            {"theoretical", row.theoretical},
            {"ratio", row.ratio},
            {"deviation", row.deviation}};
    jr["deviation_shrinking"] = row.deviation_shrinking ? Json(*row.deviation_shrinking) : Json(nullptr);
    if (!rep.bins.empty()) {
      Json bins = Json::array();
      for (const auto& b : rep.bins[i])
        bins.push_back(Json{{"delta_lo", b.delta_lo}, {"delta_hi", b.delta_hi}, {"density", b.density}, {"theory", b.theory}});
      jr["bins"] = bins;
    }
    r["rows"].push_back(jr);
  }
  r["deviation_decreasing"] = rep.deviation_decreasing();
  d["report"] = r;
  out << d.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- entry

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact counts, sampling and limiting curves for random integer matrices", "intmat"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  Common common;
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timestamp", common.timestamp, "Record the wall-clock time in the manifest");

  CountArgs ca;
  std::optional<std::int64_t> count_k;
  auto* count = app.add_subcommand("count", "Exact counts");
  count->add_option("--property", ca.property, "singular|integer-eig|real-eig|lambda-eig")->required();
  count->add_option("--n", ca.n, "Matrix dimension");
  auto* ck = count->add_option("--k", count_k, "Entry bound");
  auto* ckg = count->add_option("--k-grid", ca.ks, "Comma-separated entry bounds")->delimiter(',');
  ck->excludes(ckg);
  count->add_option("--lambda", ca.lambda, "Eigenvalue for lambda-eig");

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo probability estimate");
  estimate->add_option("--property", ea.property, "singular|integer-eig|real-eig|lambda-eig|always")->required();
  estimate->add_option("--n", ea.n, "Matrix dimension");
  estimate->add_option("--k", ea.k, "Entry bound")->required();
  estimate->add_option("--samples", ea.samples, "Number of samples");
  estimate->add_option("--seed", ea.seed, "Seed (required)");
  estimate->add_option("--lambda", ea.lambda, "Eigenvalue for lambda-eig");

  HistArgs ha;
  auto* hist = app.add_subcommand("hist", "Rescaled eigenvalue histogram");
  hist->add_option("--mode", ha.mode, "integer|real");
  hist->add_option("--source", ha.source, "exact|sampled");
  hist->add_option("--normalization", ha.normalization, "half-total|integer-count (exact source)");
  hist->add_option("--n", ha.n, "Matrix dimension");
  hist->add_option("--k", ha.k, "Entry bound")->required();
  hist->add_option("--bins", ha.bins, "Number of bins over [-2, 2]");
  hist->add_option("--bin-width", ha.bin_width, "Bin width (must divide 4)");
  hist->add_option("--samples", ha.samples, "Samples (sampled source)");
  hist->add_option("--seed", ha.seed, "Seed (sampled source)");

  double step = 0.01;
  auto* curve = app.add_subcommand("curve", "Limiting densities on a grid over [-2, 2]");
  curve->add_option("--step", step, "Grid step");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Invariant suites");
  verify->add_option("suite", va.suite, "identity|gershgorin|oracle|curves|all")->required();
  verify->add_option("--n", va.n, "Matrix dimension (default: sweep)");
  verify->add_option("--trials", va.trials, "Random matrices per dimension");
  verify->add_option("--seed", va.seed, "Seed (randomized suites)");
  verify->add_option("--k", va.k, "Entry bound for random matrices");
  verify->add_option("--k-max", va.k_max, "Largest k for the oracle sweep");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Convergence report (JSON)");
  report->add_option("--target", ra.target, "singular|integer-eig|histogram")->required();
  report->add_option("--k-grid", ra.ks, "Comma-separated entry bounds")->delimiter(',')->required();
  report->add_option("--mode", ra.mode, "integer|real (histogram)");
  report->add_option("--source", ra.source, "exact|sampled (histogram)");
  report->add_option("--bins", ra.bins, "Bins (histogram)");
  report->add_option("--samples", ra.samples, "Samples (sampled histogram)");
  report->add_option("--seed", ra.seed, "Seed (sampled histogram)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (count->parsed()) {
      if (count_k) ca.ks = {*count_k};
      return cmd_count(ca, common, out);
    }
    if (estimate->parsed()) return cmd_estimate(ea, common, out);
    if (hist->parsed()) return cmd_hist(ha, common, out);
    if (curve->parsed()) return cmd_curve(step, common, out);
    if (verify->parsed()) return cmd_verify(va, common, out, err);
    if (report->parsed()) return cmd_report(ra, common, out);
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace intmat::cli
