#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <string>
#include <vector>

#include "blmix/coupling.hpp"
#include "blmix/dn_approx.hpp"
#include "blmix/kernel.hpp"
#include "blmix/parallel.hpp"
#include "blmix/rng.hpp"
#include "blmix/spectral.hpp"
#include "blmix/sweep.hpp"

namespace blmix {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive exact spectral scan over canonical parameters with n <= n_max.

struct SpectralScanResult {
  std::int64_t combos = 0;
  std::int64_t s2_combos = 0;
  bool s1_all_zero = true;
  bool s2_all_zero = true;
  bool decomp_all_zero = true;
  bool gap_all_nonneg = true;   // lambda1^2 - lambda2 >= 0 wherever defined, n >= 4
  bool lambda1_in_unit = true;  // |lambda1| <= 1 everywhere
};

inline SpectralScanResult exact_spectral_scan(std::int64_t n_max, int threads = 1) {
  std::vector<SpectralScanResult> parts;
  std::mutex mu;
  parallel_for(n_max - 3, threads, [&](std::int64_t b, std::int64_t e) {
    SpectralScanResult local;
    for (std::int64_t idx = b; idx < e; ++idx) {
      const std::int64_t n = idx + 4;
      for (std::int64_t m = 1; 2 * m <= n; ++m) {
        for (std::int64_t r = 1; 2 * r <= n; ++r) {
          for (std::int64_t k = 1; k <= m; ++k) {
            const ChainParams p{n, m, r, k};
            ++local.combos;
            const ExactKernel K = ExactKernel::build(p);
            if (verify_eigen_identity(K, 1) != 0) local.s1_all_zero = false;
            if (s1_squared_decomposition_check_exact(p) != 0)
              local.decomp_all_zero = false;
            if (abs(lambda1_exact(p)) > 1) local.lambda1_in_unit = false;
            if (r >= 2 && m >= 2) {
              ++local.s2_combos;
              if (verify_eigen_identity(K, 2) != 0) local.s2_all_zero = false;
              const Rat gap = lambda1_exact(p) * lambda1_exact(p) - lambda2_exact(p);
              if (gap < 0) local.gap_all_nonneg = false;
            }
          }
        }
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    parts.push_back(local);
  });
  SpectralScanResult total;
  for (const auto& part : parts) {
    total.combos += part.combos;
    total.s2_combos += part.s2_combos;
    total.s1_all_zero &= part.s1_all_zero;
    total.s2_all_zero &= part.s2_all_zero;
    total.decomp_all_zero &= part.decomp_all_zero;
    total.gap_all_nonneg &= part.gap_all_nonneg;
    total.lambda1_in_unit &= part.lambda1_in_unit;
  }
  return total;
}

// Fixed pseudorandom canonical instances with r, m >= 2 (s2 defined).
inline std::vector<ChainParams> sample_instances(std::int64_t count, std::int64_t n_max,
                                                 std::uint64_t seed) {
  std::vector<ChainParams> out;
  SplitMix64 rng(seed);
  while (static_cast<std::int64_t>(out.size()) < count) {
    const std::int64_t n = 8 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n_max - 7));
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n / 2 - 1));
    const std::int64_t r = 2 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n / 2 - 1));
    const std::int64_t kmax = std::min(m, n - m);
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(kmax));
    const ChainParams p{n, m, r, k};
    try {
      p.validate();
    } catch (const param_error&) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

inline std::vector<ChainParams> ratio_sequence(const RatioTriple& t,
                                               const std::vector<std::int64_t>& ns) {
  std::vector<ChainParams> out;
  out.reserve(ns.size());
  for (std::int64_t n : ns) out.push_back(params_from_ratios(t, n));
  return out;
}

inline std::vector<std::int64_t> n_range(std::int64_t lo, std::int64_t hi,
                                         std::int64_t step) {
  std::vector<std::int64_t> v;
  for (std::int64_t n = lo; n <= hi; n += step) v.push_back(n);
  return v;
}

// ---------------------------------------------------------------------------
// verify suites (CLI-sized versions of the library's property checks)

inline std::vector<CheckResult> verify_spectral(int threads = 1) {
  std::vector<CheckResult> checks;

  {
    const auto scan = exact_spectral_scan(24, threads);
    checks.push_back({"eigen identities exact on exhaustive scan n <= 24",
                      scan.s1_all_zero && scan.s2_all_zero,
                      std::to_string(scan.combos) + " parameter combos"});
    checks.push_back({"s1^2 decomposition exact on the same scan", scan.decomp_all_zero,
                      std::to_string(scan.combos) + " parameter combos"});
  }

  {
    const auto scan = exact_spectral_scan(40, threads);
    checks.push_back({"lambda1^2 - lambda2 >= 0 exhaustively for n <= 40",
                      scan.gap_all_nonneg,
                      std::to_string(scan.s2_combos) + " combos with lambda2 defined"});
  }

  {
    const auto sample = sample_instances(50, 1000, 20240817);
    double worst1 = 0, worst2 = 0, worst_dec = 0;
    std::mutex mu;
    parallel_for(static_cast<std::int64_t>(sample.size()), threads,
                 [&](std::int64_t b, std::int64_t e) {
                   double w1 = 0, w2 = 0, wd = 0;
                   for (std::int64_t i = b; i < e; ++i) {
                     const ChainParams& p = sample[static_cast<std::size_t>(i)];
                     const auto K = build_kernel<double>(p);
                     w1 = std::max(w1, verify_eigen_identity(K, 1));
                     if (lambda2_defined(p))
                       w2 = std::max(w2, verify_eigen_identity(K, 2));
                     wd = std::max(wd, s1_squared_decomposition_check(p));
                   }
                   std::lock_guard<std::mutex> lock(mu);
                   worst1 = std::max(worst1, w1);
                   worst2 = std::max(worst2, w2);
                   worst_dec = std::max(worst_dec, wd);
                 });
    char buf[96];
    std::snprintf(buf, sizeof buf, "max s1 %.2e, max s2 %.2e", worst1, worst2);
    checks.push_back({"float eigen residuals <= 1e-9 on 50 instances up to n = 1000",
                      worst1 <= 1e-9 && worst2 <= 1e-9, buf});
    std::snprintf(buf, sizeof buf, "max %.2e", worst_dec);
    checks.push_back({"float s1^2 decomposition residual <= 1e-12 on the sample",
                      worst_dec <= 1e-12, buf});
  }

  {
    const RatioTriple t{0.02, 0.5, 0.5};
    const auto rep = eigenvalue_scaling_report(ratio_sequence(t, n_range(50, 100000, 50)));
    bool nonneg = true;
    double max_ngap = 0, max_pow = 0;
    for (const auto& row : rep.rows) {
      nonneg &= row.gap_nonneg;
      max_ngap = std::max(max_ngap, row.n_gap);
      if (row.n_abs_lambda2_pow_tn)
        max_pow = std::max(max_pow, *row.n_abs_lambda2_pow_tn);
    }
    checks.push_back({"eigenvalue-gap scaling along (k,r,m)/n = (0.02,0.5,0.5) up to n = 1e5",
                      nonneg && max_ngap <= 10.0 && max_pow <= 2.0,
                      "max n*gap = " + std::to_string(max_ngap) +
                          ", max n*|lambda2|^t_n = " + std::to_string(max_pow)});
  }

  return checks;
}

// upper 0.001 quantile of chi^2_df (Wilson-Hilferty)
inline double chi2_crit_p001(int df) {
  const double z = 3.0902323061678132;  // Phi^{-1}(0.999)
  const double d = static_cast<double>(df);
  const double c = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * c * c * c;
}

// Goodness of fit of one coordinate of the coupled chain against the exact
// one-step row; states with small expected counts share a residual bin.
inline CheckResult coupled_marginal_chi_square(const ChainParams& p, std::int64_t x,
                                               std::int64_t y, std::int64_t samples,
                                               std::uint64_t seed) {
  const auto row = transition_row<double>(p, x);
  const StateSpace ss = p.state_space();
  std::vector<std::int64_t> counts(ss.size(), 0);
  SplitMix64 rng(seed);
  for (std::int64_t i = 0; i < samples; ++i) {
    const CoupledState s = coupled_step(p, {x, y}, rng);
    ++counts[ss.index(s.x)];
  }
  double chi2 = 0.0;
  int bins = 0;
  double rest_exp = 0.0;
  std::int64_t rest_obs = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double expd = row.w[i] * static_cast<double>(samples);
    if (expd >= 5.0) {
      const double diff = static_cast<double>(counts[i]) - expd;
      chi2 += diff * diff / expd;
      ++bins;
    } else {
      rest_exp += expd;
      rest_obs += counts[i];
    }
  }
  if (rest_exp >= 5.0) {
    const double diff = static_cast<double>(rest_obs) - rest_exp;
    chi2 += diff * diff / rest_exp;
    ++bins;
  }
  const int df = std::max(1, bins - 1);
  const double crit = chi2_crit_p001(df);
  return {"coupled marginal chi-square (n=" + std::to_string(p.n) + ")", chi2 <= crit,
          "chi2 = " + std::to_string(chi2) + ", crit(p=0.001, df=" + std::to_string(df) +
              ") = " + std::to_string(crit)};
}

inline std::vector<CheckResult> verify_coupling(std::uint64_t seed = 42) {
  std::vector<CheckResult> checks;

  const std::vector<ChainParams> instances{
      {6, 3, 3, 1}, {20, 10, 10, 3}, {50, 25, 25, 5}, {100, 40, 45, 8}, {200, 80, 100, 10}};

  {
    bool ok = true;
    for (const ChainParams& p : instances) {
      const std::int64_t x = p.state_space().lo + 1, y = p.state_space().lo;
      const auto law = coupled_diff_law_exact(p, x, y);
      Rat down(Int(p.k) * p.k, Int(p.m) * (p.n - p.m));
      Rat up(Int(p.m - p.k) * (p.n - p.m - p.k), Int(p.m) * (p.n - p.m));
      down.canonicalize();
      up.canonicalize();
      auto at = [&](std::int64_t v) {
        auto it = law.find(v);
        return it == law.end() ? Rat(0) : it->second;
      };
      ok &= at(-1) == down && at(1) == up && at(0) == Rat(1) - down - up;
    }
    checks.push_back({"adjacent one-step coupled law matches the exact formulas", ok,
                      std::to_string(instances.size()) + " instances, exact rationals"});
  }

  {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const ChainParams& p = instances[i];
      const std::int64_t x = p.state_space().lo + 1, y = p.state_space().lo;
      const auto est = contraction_estimate(p, x, y, 1, 100000, seed + i);
      const double coeff = contraction_coefficient(p);
      const bool pass = std::fabs(est.mean - coeff) <= 3.0 * est.std_err;
      ok &= pass;
      if (!pass)
        detail += "instance " + std::to_string(i) + " off by " +
                  std::to_string(std::fabs(est.mean - coeff) / est.std_err) + " SE; ";
    }
    checks.push_back({"Monte-Carlo contraction within 3 SE of the coefficient", ok,
                      detail.empty() ? "5 instances x 1e5 trials" : detail});
  }

  {
    bool ok = true;
    SplitMix64 rng(seed);
    for (const ChainParams& p : instances) {
      CoupledState s{p.state_space().hi, p.state_space().hi};
      for (int t = 0; t < 500; ++t) {
        s = coupled_step(p, s, rng);
        if (s.x != s.y) ok = false;
      }
    }
    checks.push_back({"coalescence is absorbing over 500 steps", ok, ""});
  }

  checks.push_back(coupled_marginal_chi_square({20, 8, 9, 3}, 5, 3, 100000, seed ^ 0x5bd1u));
  return checks;
}

inline std::string ratio_label(const RatioTriple& t) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  return fmt(t.k) + ", " + fmt(t.r) + ", " + fmt(t.m);
}

inline std::vector<CheckResult> verify_llt() {
  std::vector<CheckResult> checks;

  {
    const auto rows =
        normalizer_check(ratio_sequence({0.02, 0.5, 0.5}, n_range(100, 2000, 100)));
    double worst = 0;
    for (const auto& row : rows) worst = std::max(worst, row.value);
    checks.push_back({"sqrt(n) |N - 1| <= 5 along (0.02, 0.5, 0.5)", worst <= 5.0,
                      "max " + std::to_string(worst)});
  }

  for (const RatioTriple t : {RatioTriple{0.02, 0.5, 0.5}, RatioTriple{0.10, 0.4, 0.4}}) {
    const auto rows = llt_decay_check(ratio_sequence(t, n_range(100, 2000, 100)));
    std::vector<double> vals;
    for (const auto& row : rows) vals.push_back(row.value);
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const bool ok = vals.back() <= 2.0 * median && vals.back() > 0.0;
    checks.push_back(
        {"sqrt(n) TV bounded along (" + ratio_label(t) + ")", ok,
         "last " + std::to_string(vals.back()) + ", median " + std::to_string(median)});
  }
  return checks;
}

}  // namespace blmix
