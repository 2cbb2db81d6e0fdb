#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/mixing.hpp"
#include "blmix/parallel.hpp"

namespace blmix {

enum class Backend { float64, rational };

enum class SweepAxis { k, r, m };

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::k: return "k";
    case SweepAxis::r: return "r";
    default: return "m";
  }
}

// A (ratio, n) grid of mixing-time cells. Axis k varies k/n with m = r fixed
// by r_ratio; axis r varies r/n with m = r and k fixed by k_ratio; axis m
// varies m/n with r and k fixed.
struct SweepGrid {
  SweepAxis axis = SweepAxis::k;
  std::vector<double> ratios;
  std::vector<std::int64_t> ns;
  double epsilon = 0.01;
  Rat epsilon_exact = Rat(1, 100);
  double k_ratio = 0.02;
  double r_ratio = 0.5;
};

// ratio*n must be an integer (tolerance 1e-9); the built-in grids always are.
inline std::optional<std::int64_t> ratio_times_n(double ratio, std::int64_t n) {
  const double v = ratio * static_cast<double>(n);
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

inline ChainParams grid_cell_params(const SweepGrid& g, double ratio, std::int64_t n) {
  auto need = [&](double rt, const char* what) {
    auto v = ratio_times_n(rt, n);
    if (!v)
      throw param_error(std::string("non-integral ") + what + " = " +
                        std::to_string(rt) + " * " + std::to_string(n));
    return *v;
  };
  ChainParams p;
  p.n = n;
  switch (g.axis) {
    case SweepAxis::k:
      p.k = need(ratio, "k");
      p.r = need(g.r_ratio, "r");
      p.m = p.r;
      break;
    case SweepAxis::r:
      p.r = need(ratio, "r");
      p.m = p.r;
      p.k = need(g.k_ratio, "k");
      break;
    case SweepAxis::m:
      p.m = need(ratio, "m");
      p.r = need(g.r_ratio, "r");
      p.k = need(g.k_ratio, "k");
      break;
  }
  p.validate();
  return p;
}

struct SweepCell {
  enum class Kind { value, inf, error };
  Kind kind = Kind::error;
  std::int64_t t_mix = 0;
  std::string error;

  static SweepCell value(std::int64_t t) { return {Kind::value, t, {}}; }
  static SweepCell inf() { return {Kind::inf, 0, {}}; }
  static SweepCell err(std::string msg) { return {Kind::error, 0, std::move(msg)}; }

  bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
  SweepGrid grid;
  std::vector<SweepCell> cells;  // ratios.size() x ns.size(), row-major

  const SweepCell& cell(std::size_t ri, std::size_t ni) const {
    return cells[ri * grid.ns.size() + ni];
  }
  std::vector<SweepCell> row(std::size_t ri) const {
    return {cells.begin() + static_cast<std::ptrdiff_t>(ri * grid.ns.size()),
            cells.begin() + static_cast<std::ptrdiff_t>((ri + 1) * grid.ns.size())};
  }
};

inline std::vector<double> ratio_scan_002_to_050() {
  std::vector<double> v;
  for (int i = 1; i <= 25; ++i) v.push_back(static_cast<double>(2 * i) / 100.0);
  return v;
}

inline std::vector<std::int64_t> n_scan_50_to_1000() {
  std::vector<std::int64_t> v;
  for (std::int64_t n = 50; n <= 1000; n += 50) v.push_back(n);
  return v;
}

// Built-in grids: 1 varies k/n (r/n = 0.50, m = r), 2 varies r/n
// (k/n = 0.02, m = r), 3 varies m/n (k/n = 0.02, r/n = 0.50). eps = 0.01.
inline SweepGrid table_grid(int which) {
  SweepGrid g;
  g.ratios = ratio_scan_002_to_050();
  g.ns = n_scan_50_to_1000();
  switch (which) {
    case 1: g.axis = SweepAxis::k; break;
    case 2: g.axis = SweepAxis::r; break;
    case 3: g.axis = SweepAxis::m; break;
    default: throw param_error("table preset must be 1, 2 or 3");
  }
  return g;
}

inline SweepCell run_cell(const SweepGrid& g, double ratio, std::int64_t n,
                          Backend backend) {
  try {
    const ChainParams p = grid_cell_params(g, ratio, n);
    MixingCurve curve = backend == Backend::float64
                            ? worst_case_curve(p, g.epsilon, 1)
                            : worst_case_curve_exact(p, g.epsilon_exact);
    switch (curve.status) {
      case MixStatus::mixed: return SweepCell::value(*curve.t_mix);
      case MixStatus::non_mixing: return SweepCell::inf();
      default:
        return SweepCell::err("cap " + std::to_string(curve.cap) +
                              " reached, d = " + std::to_string(curve.d.back()));
    }
  } catch (const std::exception& e) {
    return SweepCell::err(e.what());
  }
}

// Cells are independent and run concurrently; per-cell errors land in the
// cell, never aborting the sweep. Output ordering is fixed by the grid.
inline SweepResult sweep(const SweepGrid& g, int threads = 1,
                         Backend backend = Backend::float64) {
  if (!(g.epsilon > 0 && g.epsilon < 1)) throw param_error("sweep: epsilon in (0,1)");
  SweepResult out{g, std::vector<SweepCell>(g.ratios.size() * g.ns.size())};
  const std::int64_t total = static_cast<std::int64_t>(out.cells.size());
  // Descending n within the task order keeps the expensive cells up front.
  parallel_for_dynamic(total, threads, [&](std::int64_t idx) {
    const std::size_t R = g.ratios.size();
    const std::size_t ri = static_cast<std::size_t>(idx) % R;
    const std::size_t ni = g.ns.size() - 1 - static_cast<std::size_t>(idx) / R;
    out.cells[ri * g.ns.size() + ni] = run_cell(g, g.ratios[ri], g.ns[ni], backend);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Cutoff and bounded-regime diagnostics over a fixed ratio triple.

struct RatioTriple {
  double k = 0, r = 0, m = 0;  // k/n, r/n, m/n
};

inline bool ratios_critical(const RatioTriple& t) {
  return std::fabs(t.k - t.m * (1.0 - t.m)) <= 1e-12;
}

inline bool ratios_non_mixing(const RatioTriple& t) {
  return std::fabs(t.k - t.m) <= 1e-12 && std::fabs(t.m - 0.5) <= 1e-12;
}

inline ChainParams params_from_ratios(const RatioTriple& t, std::int64_t n) {
  ChainParams p;
  p.n = n;
  auto need = [&](double rt, const char* what) {
    auto v = ratio_times_n(rt, n);
    if (!v)
      throw param_error(std::string("non-integral ") + what + " at n = " +
                        std::to_string(n));
    return *v;
  };
  p.k = need(t.k, "k");
  p.r = need(t.r, "r");
  p.m = need(t.m, "m");
  p.validate();
  return p;
}

struct CutoffRow {
  std::int64_t n = 0;
  std::int64_t t_mix_eps = 0;
  std::int64_t t_mix_1meps = 0;
  double t_n = 0;
  double diff = 0;   // t_mix(eps) - t_n
  double ratio = 0;  // t_mix(eps) / t_mix(1-eps)
};

struct CutoffReport {
  std::vector<CutoffRow> rows;
  double diff_range = 0;  // max - min of diff across n
};

// Per n: t_mix(eps), the spectral prediction t_n, their difference (a bounded
// band under cutoff) and t_mix(eps)/t_mix(1-eps) (approaching 1). Requires
// generic ratios: gamma != h(1-h) and not the full-swap corner.
inline CutoffReport cutoff_diagnostics(const RatioTriple& t,
                                       const std::vector<std::int64_t>& ns, double eps,
                                       int threads = 1) {
  if (ratios_non_mixing(t))
    throw regime_error(regime_error::kind::non_mixing,
                       "cutoff_diagnostics: non-mixing ratios");
  if (ratios_critical(t))
    throw regime_error(regime_error::kind::critical,
                       "cutoff_diagnostics: critical ratios, use bounded_regime_check");
  std::vector<ChainParams> params;
  params.reserve(ns.size());
  for (std::int64_t n : ns) params.push_back(params_from_ratios(t, n));

  CutoffReport rep;
  rep.rows.resize(ns.size());
  std::vector<char> mixed(ns.size(), 1);
  parallel_for_dynamic(static_cast<std::int64_t>(ns.size()), threads, [&](std::int64_t idx) {
    const std::size_t i = ns.size() - 1 - static_cast<std::size_t>(idx);
    const ChainParams& p = params[i];
    try {
      MixingCurve c = worst_case_curve(p, eps, 1);
      if (c.status != MixStatus::mixed) {
        mixed[i] = 0;
        return;
      }
      CutoffRow row;
      row.n = p.n;
      row.t_mix_eps = *c.t_mix;
      row.t_mix_1meps = *c.crossing(1.0 - eps);
      row.t_n = t_n(p);
      row.diff = static_cast<double>(row.t_mix_eps) - row.t_n;
      row.ratio = static_cast<double>(row.t_mix_eps) /
                  static_cast<double>(std::max<std::int64_t>(1, row.t_mix_1meps));
      rep.rows[i] = row;
    } catch (const std::exception&) {
      mixed[i] = 0;
    }
  });
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!mixed[i])
      throw regime_error(regime_error::kind::generic,
                         "cutoff_diagnostics: n = " + std::to_string(ns[i]) + " did not mix");
  double lo = rep.rows.front().diff, hi = lo;
  for (const auto& row : rep.rows) {
    lo = std::min(lo, row.diff);
    hi = std::max(hi, row.diff);
  }
  rep.diff_range = hi - lo;
  return rep;
}

struct BoundedRow {
  std::int64_t n = 0;
  std::int64_t t_mix = 0;
  std::optional<double> q_n;
};

struct BoundedReport {
  std::vector<BoundedRow> rows;
  std::int64_t t_mix_min = 0;
  std::int64_t t_mix_max = 0;
};

// Critical-regime counterpart: t_mix per n stays bounded (and >= 2 past small
// n); q_n is reported alongside. Gate: every instance in the list classifies
// critical under the |lambda1| <= 10/sqrt(n) rule.
inline BoundedReport bounded_regime_check(const RatioTriple& t,
                                          const std::vector<std::int64_t>& ns,
                                          double eps, int threads = 1) {
  for (std::int64_t n : ns) {
    const ChainParams p = params_from_ratios(t, n);
    if (regime_of(p) != Regime::critical)
      throw regime_error(regime_error::kind::generic,
                         "bounded_regime_check: instance n = " + std::to_string(n) +
                             " is not critical");
  }
  std::vector<ChainParams> params;
  params.reserve(ns.size());
  for (std::int64_t n : ns) params.push_back(params_from_ratios(t, n));

  BoundedReport rep;
  rep.rows.resize(ns.size());
  std::vector<char> mixed(ns.size(), 1);
  parallel_for_dynamic(static_cast<std::int64_t>(ns.size()), threads, [&](std::int64_t idx) {
    const std::size_t i = ns.size() - 1 - static_cast<std::size_t>(idx);
    const ChainParams& p = params[i];
    try {
      MixingCurve c = worst_case_curve(p, eps, 1);
      if (c.status != MixStatus::mixed) {
        mixed[i] = 0;
        return;
      }
      BoundedRow row;
      row.n = p.n;
      row.t_mix = *c.t_mix;
      if (lambda2_defined(p)) row.q_n = q_n(p);
      rep.rows[i] = row;
    } catch (const std::exception&) {
      mixed[i] = 0;
    }
  });
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!mixed[i])
      throw regime_error(regime_error::kind::critical,
                         "bounded_regime_check: n = " + std::to_string(ns[i]) + " did not mix");
  rep.t_mix_min = rep.rows.front().t_mix;
  rep.t_mix_max = rep.rows.front().t_mix;
  for (const auto& row : rep.rows) {
    rep.t_mix_min = std::min(rep.t_mix_min, row.t_mix);
    rep.t_mix_max = std::max(rep.t_mix_max, row.t_mix);
  }
  return rep;
}

}  // namespace blmix
