#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/params.hpp"

namespace blmix {

inline double normal_density(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;  // 1/sqrt(2 pi)
}

// Gaussian profile sampled on {0,...,k} and renormalized:
// pmf(j) = phi((j-zeta)/xi) / (xi N) with N = sum_j phi((j-zeta)/xi)/xi.
struct DiscreteNormal {
  double zeta = 0;
  double xi = 1;
  std::int64_t kmax = 0;
  double normalizer = 1;  // N_{zeta,xi}
};

inline DiscreteNormal make_discrete_normal(double zeta, double xi, std::int64_t kmax) {
  if (!(xi > 0)) throw param_error("discrete normal: xi must be positive");
  if (kmax < 0) throw param_error("discrete normal: support {0..k} needs k >= 0");
  std::vector<double> terms(static_cast<std::size_t>(kmax) + 1);
  for (std::int64_t j = 0; j <= kmax; ++j)
    terms[static_cast<std::size_t>(j)] =
        normal_density((static_cast<double>(j) - zeta) / xi) / xi;
  // smallest-to-largest to control rounding of the normalizer
  std::sort(terms.begin(), terms.end());
  double s = 0.0, c = 0.0;
  for (double v : terms) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return {zeta, xi, kmax, s};
}

// zero outside {0..k} by convention
inline double dn_pmf(const DiscreteNormal& dn, std::int64_t j) {
  if (j < 0 || j > dn.kmax) return 0.0;
  return normal_density((static_cast<double>(j) - dn.zeta) / dn.xi) /
         (dn.xi * dn.normalizer);
}

// Matching moments for Hyp(m, l, k): location kp, scale 1 v sqrt(kpq(1-k/n)).
struct LLTParams {
  std::int64_t l = 0;
  double p = 0;
  double q = 0;
  double sigma = 1;
};

inline LLTParams llt_params(const ChainParams& cp, std::int64_t l) {
  cp.validate();
  if (l < 0 || l > cp.m)
    throw param_error("llt_params: need 0 <= l <= m");
  LLTParams out;
  out.l = l;
  out.p = static_cast<double>(l) / static_cast<double>(cp.m);
  out.q = 1.0 - out.p;
  const double v = static_cast<double>(cp.k) * out.p * out.q *
                   (1.0 - static_cast<double>(cp.k) / static_cast<double>(cp.n));
  out.sigma = std::max(1.0, std::sqrt(v));
  return out;
}

// ||Hyp(m, l, k) - dN(kp, sigma)||_TV over {0,...,k}.
inline double llt_tv(const ChainParams& cp, std::int64_t l) {
  const LLTParams lp = llt_params(cp, l);
  const DiscreteNormal dn =
      make_discrete_normal(static_cast<double>(cp.k) * lp.p, lp.sigma, cp.k);
  LogFactorialTable lf(cp.m);
  double s = 0.0, c = 0.0;
  for (std::int64_t j = 0; j <= cp.k; ++j) {
    const double h = hypergeom_pmf(lf, cp.m, l, cp.k, j);
    double y = std::fabs(h - dn_pmf(dn, j)) - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return 0.5 * s;
}

struct ScalingRow {
  std::int64_t n = 0;
  double value = 0;
};

// sqrt(n) |N - 1| along a sequence with l = round(rm/n); bounded sequences
// are the empirical content of the normalizer estimate.
inline std::vector<ScalingRow> normalizer_check(const std::vector<ChainParams>& seq) {
  std::vector<ScalingRow> rows;
  rows.reserve(seq.size());
  for (const ChainParams& p : seq) {
    const std::int64_t l = static_cast<std::int64_t>(std::llround(
        static_cast<double>(p.r) * static_cast<double>(p.m) / static_cast<double>(p.n)));
    const LLTParams lp = llt_params(p, l);
    const DiscreteNormal dn =
        make_discrete_normal(static_cast<double>(p.k) * lp.p, lp.sigma, p.k);
    rows.push_back({p.n, std::sqrt(static_cast<double>(p.n)) *
                             std::fabs(dn.normalizer - 1.0)});
  }
  return rows;
}

// sqrt(n) * TV(Hyp, dN) along a fixed-ratio sequence.
inline std::vector<ScalingRow> llt_decay_check(const std::vector<ChainParams>& seq) {
  std::vector<ScalingRow> rows;
  rows.reserve(seq.size());
  for (const ChainParams& p : seq) {
    const std::int64_t l = static_cast<std::int64_t>(std::llround(
        static_cast<double>(p.r) * static_cast<double>(p.m) / static_cast<double>(p.n)));
    rows.push_back({p.n, std::sqrt(static_cast<double>(p.n)) * llt_tv(p, l)});
  }
  return rows;
}

}  // namespace blmix
