#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/rng.hpp"

namespace blmix {

// Exact backend scalar types.
using Int = mpz_class;
using Rat = mpq_class;

// mpq_get_d truncates toward zero; divide directly when numerator and
// denominator are exactly representable so common values round correctly.
inline double rat_to_double(const Rat& q) {
  const Int& num = q.get_num();
  const Int& den = q.get_den();
  if (mpz_sizeinbase(num.get_mpz_t(), 2) <= 53 &&
      mpz_sizeinbase(den.get_mpz_t(), 2) <= 53)
    return num.get_d() / den.get_d();
  return q.get_d();
}

inline Int binom_exact(std::int64_t a, std::int64_t b) {
  if (b < 0 || b > a || a < 0) return Int(0);
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(a),
               static_cast<unsigned long>(b));
  return out;
}

struct HypSupport {
  std::int64_t lo;
  std::int64_t hi;
};

inline HypSupport hyp_support(std::int64_t N, std::int64_t K, std::int64_t draws) {
  return {std::max<std::int64_t>(0, draws - (N - K)), std::min(K, draws)};
}

inline void check_hyp_args(std::int64_t N, std::int64_t K, std::int64_t draws) {
  if (N < 0 || K < 0 || K > N || draws < 0 || draws > N)
    throw param_error("hypergeometric: need 0 <= K <= N and 0 <= draws <= N, got N=" +
                      std::to_string(N) + " K=" + std::to_string(K) +
                      " draws=" + std::to_string(draws));
}

// Log-factorials cached in long double. Evaluating the three log-binomials in
// 64-bit mantissas keeps the cancellation error of the exponent near 1e-17,
// so pmf values agree with the exact backend to ~1e-14 relative even at n ~ 10^3.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::int64_t max_n) : lf_(static_cast<std::size_t>(max_n) + 1) {
    for (std::size_t i = 0; i < lf_.size(); ++i)
      lf_[i] = std::lgammal(static_cast<long double>(i) + 1.0L);
  }

  long double log_binom(std::int64_t a, std::int64_t b) const {
    return lf_[static_cast<std::size_t>(a)] - lf_[static_cast<std::size_t>(b)] -
           lf_[static_cast<std::size_t>(a - b)];
  }

  std::int64_t max_n() const { return static_cast<std::int64_t>(lf_.size()) - 1; }

 private:
  std::vector<long double> lf_;
};

// P(Hyp(N, K, draws) = j) = C(K,j) C(N-K, draws-j) / C(N, draws),
// zero outside the support. One exponentiation of the log-binomial sum.
inline double hypergeom_pmf(const LogFactorialTable& lf, std::int64_t N,
                            std::int64_t K, std::int64_t draws, std::int64_t j) {
  check_hyp_args(N, K, draws);
  const auto [lo, hi] = hyp_support(N, K, draws);
  if (j < lo || j > hi) return 0.0;
  const long double le = lf.log_binom(K, j) + lf.log_binom(N - K, draws - j) -
                         lf.log_binom(N, draws);
  return static_cast<double>(expl(le));
}

inline double hypergeom_pmf(std::int64_t N, std::int64_t K, std::int64_t draws,
                            std::int64_t j) {
  check_hyp_args(N, K, draws);
  const auto [lo, hi] = hyp_support(N, K, draws);
  if (j < lo || j > hi) return 0.0;
  auto lb = [](std::int64_t a, std::int64_t b) {
    return std::lgammal(static_cast<long double>(a) + 1.0L) -
           std::lgammal(static_cast<long double>(b) + 1.0L) -
           std::lgammal(static_cast<long double>(a - b) + 1.0L);
  };
  const long double le = lb(K, j) + lb(N - K, draws - j) - lb(N, draws);
  return static_cast<double>(expl(le));
}

inline Rat hypergeom_pmf_exact(std::int64_t N, std::int64_t K, std::int64_t draws,
                               std::int64_t j) {
  check_hyp_args(N, K, draws);
  const auto [lo, hi] = hyp_support(N, K, draws);
  if (j < lo || j > hi) return Rat(0);
  Rat q(binom_exact(K, j) * binom_exact(N - K, draws - j), binom_exact(N, draws));
  q.canonicalize();
  return q;
}

namespace detail {

// ball-by-ball draw; O(draws) uniforms, exact for any magnitudes
inline std::int64_t sample_hypergeom_sequential(std::int64_t N, std::int64_t K,
                                                std::int64_t draws, SplitMix64& rng) {
  std::int64_t good = K, total = N, hits = 0;
  for (std::int64_t i = 0; i < draws; ++i) {
    if (rng.uniform01() * static_cast<double>(total) < static_cast<double>(good)) {
      ++hits;
      --good;
    }
    --total;
  }
  return hits;
}

}  // namespace detail

// Inverse-CDF draw, walking the support from its low end with the ratio
// recurrence p_{j+1} = p_j (K-j)(draws-j) / ((j+1)(N-K-draws+j+1)). Falls
// back to sequential draws when the support's low end underflows double
// precision (huge populations), where the walk would lose mass.
inline std::int64_t sample_hypergeom(std::int64_t N, std::int64_t K,
                                     std::int64_t draws, SplitMix64& rng) {
  check_hyp_args(N, K, draws);
  const auto [lo, hi] = hyp_support(N, K, draws);
  if (lo == hi) return lo;
  double p = hypergeom_pmf(N, K, draws, lo);
  if (p < 1e-290) return detail::sample_hypergeom_sequential(N, K, draws, rng);
  const double u = rng.uniform01();
  double cdf = p;
  std::int64_t j = lo;
  while (j < hi && cdf <= u) {
    p *= static_cast<double>(K - j) * static_cast<double>(draws - j) /
         (static_cast<double>(j + 1) * static_cast<double>(N - K - draws + j + 1));
    ++j;
    cdf += p;
  }
  return j;
}

}  // namespace blmix
