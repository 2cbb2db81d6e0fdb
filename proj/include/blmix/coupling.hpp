#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/params.hpp"
#include "blmix/rng.hpp"
#include "blmix/spectral.hpp"

namespace blmix {

// Two copies of the chain driven by one shared swap of labeled balls.
struct CoupledState {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

// Reds carry the lower labels in each urn, so the two chains' red blocks are
// nested intervals and the shared draw decomposes per urn into one
// hypergeometric for the common red prefix plus one for the differing band.
// O(1) state, same joint law as the full label construction.
inline CoupledState coupled_step(const ChainParams& p, CoupledState s, SplitMix64& rng) {
  const StateSpace ss = p.state_space();
  if (!ss.contains(s.x) || !ss.contains(s.y))
    throw state_error("coupled_step: state outside the state space");
  if (s.x == s.y) {
    // identical label layouts: both chains make the same move
    const std::int64_t h1 = sample_hypergeom(p.m, s.x, p.k, rng);
    const std::int64_t h2 = sample_hypergeom(p.n - p.m, p.r - s.x, p.k, rng);
    const std::int64_t z = s.x - h1 + h2;
    return {z, z};
  }
  const std::int64_t lo = std::min(s.x, s.y);
  const std::int64_t hi = std::max(s.x, s.y);
  const std::int64_t d = hi - lo;
  // left urn strata: (lo common reds | band of d | whites); the chain at hi
  // loses a1 + a2 reds, the chain at lo loses a1.
  const std::int64_t a1 = sample_hypergeom(p.m, lo, p.k, rng);
  const std::int64_t a2 = sample_hypergeom(p.m - lo, d, p.k - a1, rng);
  // right urn strata: (r - hi common reds | band of d | whites); the chain at
  // hi gains b1 reds, the chain at lo gains b1 + b2.
  const std::int64_t b1 = sample_hypergeom(p.n - p.m, p.r - hi, p.k, rng);
  const std::int64_t b2 = sample_hypergeom(p.n - p.m - (p.r - hi), d, p.k - b1, rng);
  const std::int64_t hi_next = hi - (a1 + a2) + b1;
  const std::int64_t lo_next = lo - a1 + (b1 + b2);
  return s.x > s.y ? CoupledState{hi_next, lo_next} : CoupledState{lo_next, hi_next};
}

// Exact law of X' - Y' after one coupled step. With d = x - y >= 0 the
// difference is d - a2 - b2 where a2 ~ Hyp(m, d, k) and b2 ~ Hyp(n-m, d, k)
// are the independent band counts of the two urns' draws.
inline std::map<std::int64_t, Rat> coupled_diff_law_exact(const ChainParams& p,
                                                          std::int64_t x, std::int64_t y) {
  const StateSpace ss = p.state_space();
  if (!ss.contains(x) || !ss.contains(y))
    throw state_error("coupled_diff_law_exact: state outside the state space");
  std::map<std::int64_t, Rat> law;
  if (x == y) {
    law[0] = Rat(1);
    return law;
  }
  const std::int64_t d = std::llabs(x - y);
  const int sign = x > y ? 1 : -1;
  const auto sa = hyp_support(p.m, d, p.k);
  const auto sb = hyp_support(p.n - p.m, d, p.k);
  for (std::int64_t a = sa.lo; a <= sa.hi; ++a) {
    const Rat pa = hypergeom_pmf_exact(p.m, d, p.k, a);
    for (std::int64_t b = sb.lo; b <= sb.hi; ++b) {
      const Rat pb = hypergeom_pmf_exact(p.n - p.m, d, p.k, b);
      law[sign * (d - a - b)] += pa * pb;
    }
  }
  return law;
}

// One-step contraction factor of the shared-label path coupling.
inline double contraction_coefficient(const ChainParams& p) {
  return 1.0 - static_cast<double>(p.k) * static_cast<double>(p.n - 2 * p.k) /
                   (static_cast<double>(p.m) * static_cast<double>(p.n - p.m));
}

struct ContractionEstimate {
  double mean = 0;      // Monte-Carlo estimate of E|Y_t^x - Y_t^y|
  double std_err = 0;
  double bound = 0;     // |x-y| * coefficient^t
  std::int64_t trials = 0;
};

inline ContractionEstimate contraction_estimate(const ChainParams& p, std::int64_t x,
                                                std::int64_t y, std::int64_t t,
                                                std::int64_t trials, std::uint64_t seed) {
  p.validate();
  if (trials < 1) throw param_error("contraction_estimate: trials >= 1");
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    CoupledState s{x, y};
    for (std::int64_t step = 0; step < t; ++step) s = coupled_step(p, s, rng);
    const double v = static_cast<double>(std::llabs(s.x - s.y));
    sum += v;
    sumsq += v * v;
  }
  ContractionEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  const double var =
      trials > 1 ? std::max(0.0, (sumsq - sum * sum / static_cast<double>(trials)) /
                                     static_cast<double>(trials - 1))
                 : 0.0;
  est.std_err = std::sqrt(var / static_cast<double>(trials));
  est.bound = static_cast<double>(std::llabs(x - y)) *
              std::pow(contraction_coefficient(p), static_cast<double>(t));
  return est;
}

// I_n(kappa) = {x : |x - rm/n| <= kappa sqrt(n)} and
// F_n(kappa) = {(x,y) in I_n^2 : |x-y| <= sqrt(n)/kappa^3}.
struct KappaSets {
  ChainParams params;
  std::int64_t kappa = 1;

  double center() const {
    return static_cast<double>(params.r) * static_cast<double>(params.m) /
           static_cast<double>(params.n);
  }
  bool in_I(std::int64_t x) const {
    return std::fabs(static_cast<double>(x) - center()) <=
           static_cast<double>(kappa) * std::sqrt(static_cast<double>(params.n));
  }
  bool in_F(std::int64_t x, std::int64_t y) const {
    const double k3 = static_cast<double>(kappa) * static_cast<double>(kappa) *
                      static_cast<double>(kappa);
    return in_I(x) && in_I(y) &&
           static_cast<double>(std::llabs(x - y)) <=
               std::sqrt(static_cast<double>(params.n)) / k3;
  }
};

struct TauDistribution {
  std::int64_t trials = 0;
  std::int64_t cap = 0;
  std::int64_t censored = 0;          // trials that never reached F by the cap
  std::vector<std::int64_t> tau;      // per trial; cap+1 marks a censored trial

  // empirical P(tau > threshold); censored trials count in the tail
  double tail_greater_than(double threshold) const {
    std::int64_t c = 0;
    for (std::int64_t v : tau)
      if (static_cast<double>(v) > threshold) ++c;
    return static_cast<double>(c) / static_cast<double>(trials);
  }
};

// Hitting time of F_n(kappa): tau = min{t >= 0 : (Y_t^x, Y_t^y) in F}.
inline TauDistribution tau_hitting_time(const ChainParams& p, std::int64_t x,
                                        std::int64_t y, std::int64_t kappa,
                                        std::int64_t trials, std::int64_t cap,
                                        std::uint64_t seed) {
  p.validate();
  if (kappa < 1) throw param_error("tau_hitting_time: kappa >= 1");
  if (trials < 1 || cap < 1) throw param_error("tau_hitting_time: trials, cap >= 1");
  const KappaSets sets{p, kappa};
  TauDistribution out;
  out.trials = trials;
  out.cap = cap;
  out.tau.resize(static_cast<std::size_t>(trials));
  for (std::int64_t i = 0; i < trials; ++i) {
    SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    CoupledState s{x, y};
    std::int64_t hit = cap + 1;
    for (std::int64_t t = 0; t <= cap; ++t) {
      if (sets.in_F(s.x, s.y)) {
        hit = t;
        break;
      }
      s = coupled_step(p, s, rng);
    }
    if (hit > cap) ++out.censored;
    out.tau[static_cast<std::size_t>(i)] = hit;
  }
  return out;
}

// Smallest kappa from which kappa^4 (1 - gamma(1-2gamma)/(h(1-h)))^kappa
// <= 1/kappa^2 holds for every larger kappa as well. kappa = 1 satisfies the
// raw inequality vacuously (c < 1), so the useful value is the upper
// zero-crossing of the concave map kappa -> 6 log(kappa) + kappa log(c):
// scan up from its maximizer at -6/log(c).
inline std::int64_t min_kappa(double gamma, double h) {
  if (!(gamma > 0 && h > 0 && h < 1)) throw param_error("min_kappa: need 0 < gamma, 0 < h < 1");
  const double c = 1.0 - gamma * (1.0 - 2.0 * gamma) / (h * (1.0 - h));
  if (c <= 0.0) return 1;
  if (c >= 1.0) throw param_error("min_kappa: contraction coefficient >= 1");
  const double logc = std::log(c);
  auto f = [&](std::int64_t kappa) {
    return 6.0 * std::log(static_cast<double>(kappa)) +
           static_cast<double>(kappa) * logc;
  };
  const std::int64_t peak =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(-6.0 / logc)));
  if (f(peak) <= 0.0) return 1;  // the condition never fails
  for (std::int64_t kappa = peak; kappa <= 100000000; ++kappa)
    if (f(kappa) <= 0.0) return kappa;
  throw param_error("min_kappa: no kappa <= 1e8 satisfies the condition");
}

}  // namespace blmix
