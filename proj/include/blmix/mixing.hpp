#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/kernel.hpp"
#include "blmix/parallel.hpp"
#include "blmix/params.hpp"
#include "blmix/prob_vector.hpp"
#include "blmix/spectral.hpp"

namespace blmix {

// Absorbs float noise at exact-tie cells; the exact backend compares with <=.
inline constexpr double tv_tie_guard = 1e-12;

enum class MixStatus { mixed, non_mixing, inconclusive };
enum class StartSet { all, extremes };

// Worst-case total-variation trajectory d(t) = max_x ||delta_x P^t - pi||_TV
// with its first epsilon-crossing.
struct MixingCurve {
  ChainParams params;
  double epsilon = 0.01;
  std::vector<double> d;                 // d[t] for t = 0..last computed
  std::vector<std::int64_t> worst_start; // argmax state per t
  std::optional<std::int64_t> t_mix;
  MixStatus status = MixStatus::inconclusive;
  std::int64_t cap = 0;
  // d should never increase; checked during recording, never used for exit
  bool monotone = true;

  // first t with d(t) <= threshold (+ float guard), if reached
  std::optional<std::int64_t> crossing(double threshold) const {
    for (std::size_t t = 0; t < d.size(); ++t)
      if (d[t] <= threshold + tv_tie_guard) return static_cast<std::int64_t>(t);
    return std::nullopt;
  }
};

// Generous multiple of the spectral prediction; 1000 when t_n is undefined.
inline std::int64_t default_step_cap(const ChainParams& p) {
  try {
    return std::max<std::int64_t>(1000, static_cast<std::int64_t>(std::ceil(10.0 * t_n(p))));
  } catch (const regime_error&) {
    return 1000;
  }
}

// start * P^t by t successive vector-kernel products; P^t is never formed.
template <class Scalar>
ProbVector<Scalar> evolve(const TransitionKernel<Scalar>& K, ProbVector<Scalar> start,
                          std::int64_t t) {
  if (start.support != K.states) throw shape_error("evolve: support mismatch");
  if (t < 0) throw param_error("evolve: t must be >= 0");
  const std::size_t S = K.size();
  const std::int64_t band = K.params.k;
  std::vector<Scalar> next(S);
  for (std::int64_t step = 0; step < t; ++step) {
    std::fill(next.begin(), next.end(), Scalar(0));
    for (std::size_t xi = 0; xi < S; ++xi) {
      const Scalar& c = start.w[xi];
      if (c == Scalar(0)) continue;
      const Scalar* row = K.row(xi);
      const std::size_t y0 =
          band >= static_cast<std::int64_t>(xi) ? 0 : xi - static_cast<std::size_t>(band);
      const std::size_t y1 =
          std::min(S - 1, xi + static_cast<std::size_t>(band));
      for (std::size_t yi = y0; yi <= y1; ++yi) next[yi] += c * row[yi];
    }
    start.w.swap(next);
  }
  return start;
}

namespace detail {

// rows[b..e) of out = rows of a times K, using the band |x-y| <= k of K.
inline void rows_times_kernel(const double* a, double* out, std::size_t nrows,
                              const TransitionKernel<double>& K, int threads) {
  const std::size_t S = K.size();
  const std::size_t band = static_cast<std::size_t>(
      std::min<std::int64_t>(K.params.k, static_cast<std::int64_t>(S)));
  parallel_for(static_cast<std::int64_t>(nrows), threads,
               [&](std::int64_t b, std::int64_t e) {
                 for (std::int64_t i = b; i < e; ++i) {
                   const double* arow = a + static_cast<std::size_t>(i) * S;
                   double* orow = out + static_cast<std::size_t>(i) * S;
                   std::fill(orow, orow + S, 0.0);
                   for (std::size_t x = 0; x < S; ++x) {
                     const double c = arow[x];
                     if (c == 0.0) continue;
                     const double* prow = K.row(x);
                     const std::size_t y0 = x >= band ? x - band : 0;
                     const std::size_t y1 = std::min(S - 1, x + band);
                     for (std::size_t y = y0; y <= y1; ++y) orow[y] += c * prow[y];
                   }
                 }
               });
}

inline double tv_row_vs(const double* row, const std::vector<double>& pi) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    double y = std::fabs(row[i] - pi[i]) - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return 0.5 * s;
}

}  // namespace detail

// Evolves every point-mass start simultaneously (one matrix product per step)
// and records d(t) until the first crossing d(t) <= eps or the cap. The sup
// over starts runs over ALL states; StartSet::extremes restricts to {lo, hi}
// and is approximate by definition.
inline MixingCurve worst_case_curve(const TransitionKernel<double>& K, double eps,
                                    std::int64_t cap, int threads = 1,
                                    StartSet starts = StartSet::all) {
  if (!(eps > 0.0 && eps < 1.0)) throw param_error("worst_case_curve: eps must be in (0,1)");
  if (cap < 1) throw param_error("worst_case_curve: cap must be >= 1");
  MixingCurve out;
  out.params = K.params;
  out.epsilon = eps;
  out.cap = cap;
  if (K.params.full_deterministic_swap()) {
    out.status = MixStatus::non_mixing;
    return out;
  }

  const std::size_t S = K.size();
  const std::size_t nstarts = starts == StartSet::all ? S : std::min<std::size_t>(2, S);
  std::vector<double> A(nstarts * S, 0.0), B(nstarts * S, 0.0);
  std::vector<std::int64_t> start_state(nstarts);
  if (starts == StartSet::all) {
    for (std::size_t i = 0; i < S; ++i) {
      A[i * S + i] = 1.0;
      start_state[i] = K.states.state(i);
    }
  } else {
    A[0 * S + 0] = 1.0;
    start_state[0] = K.states.lo;
    if (nstarts > 1) {
      A[1 * S + (S - 1)] = 1.0;
      start_state[1] = K.states.hi;
    }
  }

  std::vector<double> pi(S);
  {
    auto piv = stationary_pmf<double>(K.params);
    pi = piv.w;
  }

  std::vector<double> tv(nstarts);
  for (std::int64_t t = 0;; ++t) {
    parallel_for(static_cast<std::int64_t>(nstarts), threads,
                 [&](std::int64_t b, std::int64_t e) {
                   for (std::int64_t i = b; i < e; ++i)
                     tv[static_cast<std::size_t>(i)] =
                         detail::tv_row_vs(A.data() + static_cast<std::size_t>(i) * S, pi);
                 });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < nstarts; ++i)
      if (tv[i] > tv[arg]) arg = i;
    if (!out.d.empty() && tv[arg] > out.d.back() + tv_tie_guard) out.monotone = false;
    out.d.push_back(tv[arg]);
    out.worst_start.push_back(start_state[arg]);
    if (tv[arg] <= eps + tv_tie_guard) {
      out.t_mix = t;
      out.status = MixStatus::mixed;
      return out;
    }
    if (t == cap) {
      out.status = MixStatus::inconclusive;
      return out;
    }
    detail::rows_times_kernel(A.data(), B.data(), nstarts, K, threads);
    A.swap(B);
  }
}

inline MixingCurve worst_case_curve(const ChainParams& p, double eps, int threads = 1,
                                    StartSet starts = StartSet::all) {
  p.validate();
  if (p.full_deterministic_swap()) {
    MixingCurve out;
    out.params = p;
    out.epsilon = eps;
    out.status = MixStatus::non_mixing;
    return out;
  }
  const auto K = build_kernel<double>(p, threads);
  return worst_case_curve(K, eps, default_step_cap(p), threads, starts);
}

// Exact-backend mixing time. The running distribution matrix stays in integer
// form A / den_t with den_t = den^t, and each crossing test
//   d(t) <= eps  <=>  eps_den * max_x sum_y |A[x][y] C - pi_num[y] den_t|
//                       <= 2 eps_num den_t C         (C = C(n,m))
// is decided in integer arithmetic.
inline MixingCurve worst_case_curve_exact(const ChainParams& p, const Rat& eps,
                                          std::int64_t cap = 0, int threads = 1) {
  p.validate();
  if (!(eps > 0 && eps < 1)) throw param_error("worst_case_curve_exact: eps must be in (0,1)");
  MixingCurve out;
  out.params = p;
  out.epsilon = rat_to_double(eps);
  if (p.full_deterministic_swap()) {
    out.status = MixStatus::non_mixing;
    return out;
  }
  if (cap < 1) cap = default_step_cap(p);
  out.cap = cap;

  const ExactKernel K = ExactKernel::build(p);
  const std::size_t S = K.size();
  std::vector<Int> A(S * S, Int(0)), B(S * S, Int(0));
  for (std::size_t i = 0; i < S; ++i) A[i * S + i] = 1;
  Int den_t(1);

  std::vector<Int> pin(S);
  for (std::size_t i = 0; i < S; ++i) {
    const std::int64_t j = K.states.state(i);
    pin[i] = binom_exact(p.r, j) * binom_exact(p.n - p.r, p.m - j);
  }
  const Int pi_den = binom_exact(p.n, p.m);

  const Int eps_num = eps.get_num(), eps_den = eps.get_den();
  std::vector<Int> l1(S);
  Int prev_l1max(-1);
  for (std::int64_t t = 0;; ++t) {
    parallel_for(static_cast<std::int64_t>(S), threads, [&](std::int64_t b, std::int64_t e) {
      Int diff;
      for (std::int64_t xi = b; xi < e; ++xi) {
        Int acc(0);
        const Int* row = A.data() + static_cast<std::size_t>(xi) * S;
        for (std::size_t yi = 0; yi < S; ++yi) {
          diff = row[yi] * pi_den - pin[yi] * den_t;
          acc += abs(diff);
        }
        l1[static_cast<std::size_t>(xi)] = acc;
      }
    });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < S; ++i)
      if (l1[i] > l1[arg]) arg = i;
    {
      // d(t) <= d(t-1) exactly: compare T_t against T_{t-1} * den
      if (prev_l1max >= 0 && l1[arg] > prev_l1max * K.den) out.monotone = false;
      prev_l1max = l1[arg];
      Rat dval(l1[arg], Int(2) * den_t * pi_den);
      dval.canonicalize();
      out.d.push_back(rat_to_double(dval));
      out.worst_start.push_back(K.states.state(arg));
    }
    // d(t) <= eps, exact
    if (l1[arg] * eps_den <= Int(2) * eps_num * den_t * pi_den) {
      out.t_mix = t;
      out.status = MixStatus::mixed;
      return out;
    }
    if (t == cap) {
      out.status = MixStatus::inconclusive;
      return out;
    }
    parallel_for(static_cast<std::int64_t>(S), threads, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) {
        const Int* arow = A.data() + static_cast<std::size_t>(i) * S;
        Int* orow = B.data() + static_cast<std::size_t>(i) * S;
        for (std::size_t y = 0; y < S; ++y) orow[y] = 0;
        for (std::size_t x = 0; x < S; ++x) {
          if (arow[x] == 0) continue;
          const Int* prow = K.num.data() + x * S;
          const std::size_t y0 =
              x >= static_cast<std::size_t>(p.k) ? x - static_cast<std::size_t>(p.k) : 0;
          const std::size_t y1 = std::min(S - 1, x + static_cast<std::size_t>(p.k));
          for (std::size_t y = y0; y <= y1; ++y) {
            if (prow[y] != 0)
              mpz_addmul(orow[y].get_mpz_t(), arow[x].get_mpz_t(), prow[y].get_mpz_t());
          }
        }
      }
    });
    A.swap(B);
    den_t *= K.den;
  }
}

}  // namespace blmix
