#pragma once

// Limiting constants and densities for 2x2 integer matrices as k grows, and
// the comparison of exact or sampled data against them.
//
// Curves are functions of delta = lambda / k. The integer-spectrum density is
// alpha * V(|delta|) and the real-spectrum density is beta * W(|delta|); both
// integrate to 2 over [-2, 2].

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "intmat/count_record.hpp"
#include "intmat/monte_carlo.hpp"

namespace intmat {

struct TheoryConstants {
  double singular_coeff;        // 6/pi^2: P(singular) ~ c log k / k^2
  double integer_eig_coeff;     // (7 sqrt2 + 4 + 3 log(sqrt2 + 1)) / (3 pi^2): P(integer eig) ~ c log k / k
  double alpha;                 // 9 / (14 sqrt2 + 8 + 6 log(sqrt2 + 1))
  double beta;                  // 72/49
  double real_eig_prob;         // 49/72
  double singular_count_coeff;  // 96/pi^2: |M^0_2(k)| ~ c k^2 log k
};

inline TheoryConstants theory_constants() {
  using std::numbers::pi;
  using std::numbers::sqrt2;
  const double log_term = std::log(sqrt2 + 1.0);
  return {
      6.0 / (pi * pi),
      (7.0 * sqrt2 + 4.0 + 3.0 * log_term) / (3.0 * pi * pi),
      9.0 / (14.0 * sqrt2 + 8.0 + 6.0 * log_term),
      72.0 / 49.0,
      49.0 / 72.0,
      96.0 / (pi * pi),
  };
}

namespace detail {

// x log|x|, continued by 0 at x = 0.
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

inline void require_profile_domain(double delta) {
  if (!(delta >= 0.0 && delta <= 2.0)) throw std::domain_error("profile argument must lie in [0, 2]");
}

inline void require_density_domain(double delta) {
  if (!(delta >= -2.0 && delta <= 2.0)) throw std::domain_error("density argument must lie in [-2, 2]");
}

}  // namespace detail

/// Closed-form pieces of the profiles, evaluated without domain checks so the
/// joins can be compared directly.
namespace profile_piece {

/// V on [0, sqrt2].
inline double integer_inner(double d) {
  return 4.0 - 2.0 * d - d * d + d * d * std::log1p(d) + 2.0 * detail::xlogx(d - 1.0);
}

/// V on [sqrt2, 2].
inline double integer_outer(double d) {
  const double e = d - 1.0;
  return d * d - 2.0 * d - std::log(e) - e * detail::xlogx(e);
}

/// W on [0, 1].
inline double real_inner(double d) {
  const double poly = (80.0 + 20.0 * d + 90.0 * d * d + 52.0 * d * d * d - 107.0 * d * d * d * d) / (144.0 * (1.0 + d));
  return poly - (5.0 - 7.0 * d + 8.0 * d * d) * detail::xlogx(1.0 - d) / 12.0 - d * (1.0 - d * d) * std::log1p(d) / 4.0;
}

/// W on [1, sqrt2].
inline double real_middle(double d) {
  const double poly = d * (20.0 + 10.0 * d - 12.0 * d * d - 3.0 * d * d * d) / (16.0 * (1.0 + d));
  return poly + (3.0 * d - 1.0) * detail::xlogx(d - 1.0) / 4.0 + d * (d * d - 1.0) * std::log1p(d) / 4.0;
}

/// W on [sqrt2, 2]. The rational part has denominator 16(d - 1); d >= sqrt2
/// keeps it away from zero.
inline double real_outer(double d) {
  const double e = d - 1.0;
  return d * (d - 2.0) * (2.0 - 6.0 * d + 3.0 * d * d) / (16.0 * e) - e * e * detail::xlogx(e) / 4.0;
}

}  // namespace profile_piece

/// V(delta), delta in [0, 2].
inline double integer_profile(double delta) {
  detail::require_profile_domain(delta);
  return delta <= std::numbers::sqrt2 ? profile_piece::integer_inner(delta) : profile_piece::integer_outer(delta);
}

/// W(delta), delta in [0, 2].
inline double real_profile(double delta) {
  detail::require_profile_domain(delta);
  if (delta <= 1.0) return profile_piece::real_inner(delta);
  if (delta <= std::numbers::sqrt2) return profile_piece::real_middle(delta);
  return profile_piece::real_outer(delta);
}

/// Limiting density of integer eigenvalues, alpha * V(|delta|).
inline double integer_limit_density(double delta) {
  detail::require_density_domain(delta);
  return theory_constants().alpha * integer_profile(std::abs(delta));
}

/// Limiting density of real eigenvalues, beta * W(|delta|).
inline double real_limit_density(double delta) {
  detail::require_density_domain(delta);
  return theory_constants().beta * real_profile(std::abs(delta));
}

enum class CurveId { integer_density, real_density, integer_profile, real_profile };

inline const char* to_string(CurveId id) {
  switch (id) {
    case CurveId::integer_density: return "U_Z";
    case CurveId::real_density: return "U_R";
    case CurveId::integer_profile: return "V";
    case CurveId::real_profile: return "W";
  }
  return "?";
}

inline double curve_value(CurveId id, double delta) {
  switch (id) {
    case CurveId::integer_density: return integer_limit_density(delta);
    case CurveId::real_density: return real_limit_density(delta);
    case CurveId::integer_profile: return integer_profile(delta);
    case CurveId::real_profile: return real_profile(delta);
  }
  throw std::invalid_argument("unknown curve");
}

inline bool is_profile(CurveId id) { return id == CurveId::integer_profile || id == CurveId::real_profile; }

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with absolute tolerance tol.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 60) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Points where the curves change formula or lose smoothness.
inline std::vector<double> curve_breakpoints() {
  using std::numbers::sqrt2;
  return {-sqrt2, -1.0, 0.0, 1.0, sqrt2};
}

/// Integral of a curve over [lo, hi], split at every breakpoint inside the
/// range; the tolerance is shared evenly between the panels.
inline double integrate_curve(CurveId id, double lo, double hi, double tol) {
  const double min = is_profile(id) ? 0.0 : -2.0;
  if (!(lo >= min && hi <= 2.0 && lo <= hi)) throw std::invalid_argument("integration range outside the curve domain");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  std::vector<double> cuts{lo};
  for (double b : curve_breakpoints())
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  const double panel_tol = tol / static_cast<double>(cuts.size() - 1);
  const auto f = [id](double x) { return curve_value(id, x); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += adaptive_simpson(f, cuts[i], cuts[i + 1], panel_tol);
  return total;
}

/// Evenly spaced samples of one curve over its domain, endpoints included.
struct CurveTable {
  CurveId id = CurveId::integer_density;
  double step = 0.01;
  std::vector<std::pair<double, double>> points;
};

/// Grid over [-2, 2] (or [0, 2] for profiles) whose step must divide the
/// width; nodes are computed from their index so 0 and the ends are exact.
inline std::vector<double> curve_grid(double step, bool profile = false) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  const double lo = profile ? 0.0 : -2.0;
  const double width = 2.0 - lo;
  const double raw = width / step;
  const double intervals = std::round(raw);
  if (intervals < 1.0 || std::abs(intervals - raw) > 1e-9 * raw)
    throw std::invalid_argument("grid step must divide the curve domain evenly");
  const auto count = static_cast<std::int64_t>(intervals);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count + 1));
  for (std::int64_t i = 0; i <= count; ++i) {
    if (profile)
      grid.push_back(2.0 * static_cast<double>(i) / static_cast<double>(count));
    else
      grid.push_back(2.0 * static_cast<double>(2 * i - count) / static_cast<double>(count));
  }
  return grid;
}

inline CurveTable curve_table(CurveId id, double step) {
  CurveTable t{id, step, {}};
  for (double d : curve_grid(step, is_profile(id))) t.points.emplace_back(d, curve_value(id, d));
  return t;
}

/// Left and right difference quotients at x (diagnostic only).
inline std::pair<double, double> one_sided_slopes(CurveId id, double x, double h = 1e-6) {
  const double fx = curve_value(id, x);
  const double max = 2.0, min = is_profile(id) ? 0.0 : -2.0;
  const double left = x - h >= min ? (fx - curve_value(id, x - h)) / h : std::nan("");
  const double right = x + h <= max ? (curve_value(id, x + h) - fx) / h : std::nan("");
  return {left, right};
}

/// sum over bins of the integral of |density - curve| across the bin.
inline double l1_distance(const ScaledHistogram& h, CurveId id, double tol_per_bin = 1e-10) {
  double total = 0.0;
  for (std::size_t i = 0; i < h.bins; ++i) {
    const double lo = h.bin_lo(i), hi = h.bin_hi(i), level = h.density[i];
    std::vector<double> cuts{lo};
    for (double b : curve_breakpoints())
      if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    const auto f = [&](double x) { return std::abs(level - curve_value(id, x)); };
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) total += adaptive_simpson(f, cuts[c], cuts[c + 1], tol_per_bin, 30);
  }
  return total;
}

enum class ReportTarget { singular, integer_eig, histogram };

inline const char* to_string(ReportTarget t) {
  switch (t) {
    case ReportTarget::singular: return "singular";
    case ReportTarget::integer_eig: return "integer-eig";
    case ReportTarget::histogram: return "histogram";
  }
  return "?";
}

struct ConvergenceRow {
  std::int64_t k = 0;
  double empirical = 0.0;
  double theoretical = 0.0;
  double ratio = 0.0;
  double deviation = 0.0;                       // what the trend is judged on
  std::optional<bool> deviation_shrinking;      // against the previous row
};

struct BinComparison {
  double delta_lo, delta_hi, density, theory;
};

struct ConvergenceReport {
  ReportTarget target = ReportTarget::singular;
  std::string property;
  std::string normalization;
  std::string source;
  std::string criterion = "trend";  // the asymptotics carry no rate, so rows are trend-gated
  std::vector<ConvergenceRow> rows;
  std::vector<std::vector<BinComparison>> bins;  // histogram target only, per row

  bool deviation_decreasing() const {
    for (const auto& r : rows)
      if (r.deviation_shrinking && !*r.deviation_shrinking) return false;
    return rows.size() >= 2;
  }
};

namespace detail {

inline void mark_trend(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) rows[i].deviation_shrinking = rows[i].deviation < rows[i - 1].deviation;
}

}  // namespace detail

/// Ratio of exact probabilities to their asymptotic forms:
/// singular P k^2 / log k vs 6/pi^2; integer-eig P k / log k vs its constant.
/// Deviation is |ratio - 1| relative to the constant.
inline ConvergenceReport convergence_report(std::span<const CountRecord> records, ReportTarget target) {
  if (target == ReportTarget::histogram) throw std::invalid_argument("histogram reports take histograms");
  if (records.size() < 2) throw std::invalid_argument("convergence report needs at least 2 points");
  const Property want = target == ReportTarget::singular ? Property::singular : Property::integer_eig;
  const TheoryConstants tc = theory_constants();
  ConvergenceReport rep;
  rep.target = target;
  rep.property = to_string(target);
  rep.source = "exact counts";
  rep.normalization = target == ReportTarget::singular ? "P(k) * k^2 / log k vs 6/pi^2"
                                                       : "P(k) * k / log k vs (7*sqrt2 + 4 + 3*log(sqrt2 + 1)) / (3*pi^2)";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CountRecord& r = records[i];
    if (r.property.kind != want || r.n != 2) throw std::invalid_argument("records do not match the report target");
    if (r.k < 2) throw std::invalid_argument("report needs k >= 2 (log k must be positive)");
    if (i > 0 && r.k <= records[i - 1].k) throw std::invalid_argument("report needs strictly increasing k");
    const double k = static_cast<double>(r.k);
    ConvergenceRow row;
    row.k = r.k;
    row.empirical = target == ReportTarget::singular ? r.probability * k * k / std::log(k) : r.probability * k / std::log(k);
    row.theoretical = target == ReportTarget::singular ? tc.singular_coeff : tc.integer_eig_coeff;
    row.ratio = row.empirical / row.theoretical;
    row.deviation = std::abs(row.ratio - 1.0);
    rep.rows.push_back(row);
  }
  detail::mark_trend(rep.rows);
  return rep;
}

/// Histograms against the matching limiting density. Each row holds the L1
/// distance (empirical), 0 (theoretical), and the delta = 0 bin density over
/// the curve at 0 (ratio); the trend is judged on the L1 distance.
inline ConvergenceReport convergence_report(std::span<const ScaledHistogram> hists) {
  if (hists.size() < 2) throw std::invalid_argument("convergence report needs at least 2 points");
  ConvergenceReport rep;
  rep.target = ReportTarget::histogram;
  const SpectrumMode mode = hists.front().mode;
  const CurveId curve = mode == SpectrumMode::integer_spectrum ? CurveId::integer_density : CurveId::real_density;
  rep.property = to_string(mode);
  rep.source = to_string(hists.front().source);
  rep.normalization = "density = bin weight / (normalizer * bin width); L1 = sum of integral |density - curve|";
  for (std::size_t i = 0; i < hists.size(); ++i) {
    const ScaledHistogram& h = hists[i];
    if (h.mode != mode) throw std::invalid_argument("histograms mix spectrum modes");
    if (i > 0 && h.k <= hists[i - 1].k) throw std::invalid_argument("report needs strictly increasing k");
    ConvergenceRow row;
    row.k = h.k;
    row.empirical = l1_distance(h, curve);
    row.theoretical = 0.0;
    row.ratio = h.density[h.zero_bin()] / curve_value(curve, 0.0);
    row.deviation = row.empirical;
    rep.rows.push_back(row);
    std::vector<BinComparison> cmp;
    for (std::size_t b = 0; b < h.bins; ++b) {
      const double mid = 0.5 * (h.bin_lo(b) + h.bin_hi(b));
      cmp.push_back({h.bin_lo(b), h.bin_hi(b), h.density[b], curve_value(curve, mid)});
    }
    rep.bins.push_back(std::move(cmp));
  }
  detail::mark_trend(rep.rows);
  return rep;
}

}  // namespace intmat
