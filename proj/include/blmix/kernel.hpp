#pragma once

#include <cstdint>
#include <type_traits>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/parallel.hpp"
#include "blmix/params.hpp"
#include "blmix/prob_vector.hpp"

namespace blmix {

// Row-stochastic one-step kernel, rows indexed by the current state.
// Immutable after construction; rows are supported inside |x - y| <= k.
template <class Scalar>
struct TransitionKernel {
  ChainParams params;
  StateSpace states;
  std::vector<Scalar> p;  // row-major, size() x size()

  std::size_t size() const { return states.size(); }

  const Scalar* row(std::size_t xi) const { return p.data() + xi * size(); }

  const Scalar& at(std::int64_t x, std::int64_t y) const {
    return p[states.index(x) * size() + states.index(y)];
  }

  ProbVector<Scalar> row_vector(std::int64_t x) const {
    if (!states.contains(x)) throw state_error("row_vector: state outside the state space");
    ProbVector<Scalar> out(states);
    const Scalar* r = row(states.index(x));
    for (std::size_t i = 0; i < size(); ++i) out.w[i] = r[i];
    return out;
  }
};

namespace detail {

// pmf of Hyp(N, K, draws) over the full draw range [0, draws]; zeros off-support.
inline std::vector<double> hyp_pmf_range(const LogFactorialTable& lf, std::int64_t N,
                                         std::int64_t K, std::int64_t draws) {
  std::vector<double> v(static_cast<std::size_t>(draws) + 1, 0.0);
  const auto [lo, hi] = hyp_support(N, K, draws);
  for (std::int64_t j = lo; j <= hi; ++j)
    v[static_cast<std::size_t>(j)] = hypergeom_pmf(lf, N, K, draws, j);
  return v;
}

inline std::vector<Rat> hyp_pmf_range_exact(std::int64_t N, std::int64_t K,
                                            std::int64_t draws) {
  std::vector<Rat> v(static_cast<std::size_t>(draws) + 1, Rat(0));
  const auto [lo, hi] = hyp_support(N, K, draws);
  for (std::int64_t j = lo; j <= hi; ++j)
    v[static_cast<std::size_t>(j)] = hypergeom_pmf_exact(N, K, draws, j);
  return v;
}

// out[x - h1 + h2] += p1[h1] * p2[h2]; Kahan-compensated for the float backend.
template <class Scalar>
void convolve_step_law(const ChainParams& cp, std::int64_t x,
                       const std::vector<Scalar>& p1, const std::vector<Scalar>& p2,
                       ProbVector<Scalar>& out) {
  const StateSpace ss = out.support;
  std::vector<double> comp;
  if constexpr (std::is_same_v<Scalar, double>) comp.assign(out.w.size(), 0.0);
  for (std::int64_t h1 = 0; h1 <= cp.k; ++h1) {
    const Scalar& a = p1[static_cast<std::size_t>(h1)];
    if (a == Scalar(0)) continue;
    for (std::int64_t h2 = 0; h2 <= cp.k; ++h2) {
      const Scalar& b = p2[static_cast<std::size_t>(h2)];
      if (b == Scalar(0)) continue;
      const std::size_t yi = ss.index(x - h1 + h2);
      if constexpr (std::is_same_v<Scalar, double>) {
        double term = a * b - comp[yi];
        double t = out.w[yi] + term;
        comp[yi] = (t - out.w[yi]) - term;
        out.w[yi] = t;
      } else {
        out.w[yi] += a * b;
      }
    }
  }
}

}  // namespace detail

// One step from x: law of x - H1 + H2 with H1 ~ Hyp(m, x, k) (red balls
// leaving the left urn) and H2 ~ Hyp(n-m, r-x, k) (red balls entering).
template <class Scalar>
ProbVector<Scalar> transition_row(const ChainParams& cp, std::int64_t x) {
  cp.validate();
  const StateSpace ss = cp.state_space();
  if (!ss.contains(x)) throw state_error("transition_row: state outside the state space");
  ProbVector<Scalar> out(ss);
  if constexpr (std::is_same_v<Scalar, double>) {
    LogFactorialTable lf(cp.n);
    const auto p1 = detail::hyp_pmf_range(lf, cp.m, x, cp.k);
    const auto p2 = detail::hyp_pmf_range(lf, cp.n - cp.m, cp.r - x, cp.k);
    detail::convolve_step_law(cp, x, p1, p2, out);
  } else {
    const auto p1 = detail::hyp_pmf_range_exact(cp.m, x, cp.k);
    const auto p2 = detail::hyp_pmf_range_exact(cp.n - cp.m, cp.r - x, cp.k);
    detail::convolve_step_law(cp, x, p1, p2, out);
  }
  return out;
}

// Rows are independent; the double backend builds them in parallel when asked.
template <class Scalar>
TransitionKernel<Scalar> build_kernel(const ChainParams& cp, int threads = 1) {
  cp.validate();
  const StateSpace ss = cp.state_space();
  const std::size_t S = ss.size();
  TransitionKernel<Scalar> K{cp, ss, std::vector<Scalar>(S * S, Scalar(0))};
  if constexpr (std::is_same_v<Scalar, double>) {
    const LogFactorialTable lf(cp.n);
    parallel_for(static_cast<std::int64_t>(S), threads, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t xi = b; xi < e; ++xi) {
        const std::int64_t x = ss.state(static_cast<std::size_t>(xi));
        ProbVector<double> row(ss);
        const auto p1 = detail::hyp_pmf_range(lf, cp.m, x, cp.k);
        const auto p2 = detail::hyp_pmf_range(lf, cp.n - cp.m, cp.r - x, cp.k);
        detail::convolve_step_law(cp, x, p1, p2, row);
        for (std::size_t yi = 0; yi < S; ++yi)
          K.p[static_cast<std::size_t>(xi) * S + yi] = row.w[yi];
      }
    });
  } else {
    for (std::size_t xi = 0; xi < S; ++xi) {
      auto row = transition_row<Scalar>(cp, ss.state(xi));
      for (std::size_t yi = 0; yi < S; ++yi) K.p[xi * S + yi] = row.w[yi];
    }
  }
  return K;
}

// Stationary law: Hyp(n, r, m) restricted to the state space (its natural support).
template <class Scalar>
ProbVector<Scalar> stationary_pmf(const ChainParams& cp) {
  cp.validate();
  const StateSpace ss = cp.state_space();
  ProbVector<Scalar> pi(ss);
  if constexpr (std::is_same_v<Scalar, double>) {
    LogFactorialTable lf(cp.n);
    for (std::size_t i = 0; i < ss.size(); ++i)
      pi.w[i] = hypergeom_pmf(lf, cp.n, cp.r, cp.m, ss.state(i));
  } else {
    for (std::size_t i = 0; i < ss.size(); ++i)
      pi.w[i] = hypergeom_pmf_exact(cp.n, cp.r, cp.m, ss.state(i));
  }
  return pi;
}

// Integer form of the kernel: row x of P equals num[x][.] / den with the
// x-independent denominator den = C(m,k) C(n-m,k). Matrix powers then stay in
// integer arithmetic, which is what makes exact mixing times tractable.
struct ExactKernel {
  ChainParams params;
  StateSpace states;
  Int den;
  std::vector<Int> num;  // row-major

  std::size_t size() const { return states.size(); }

  static ExactKernel build(const ChainParams& cp) {
    cp.validate();
    const StateSpace ss = cp.state_space();
    const std::size_t S = ss.size();
    ExactKernel K{cp, ss, binom_exact(cp.m, cp.k) * binom_exact(cp.n - cp.m, cp.k),
                  std::vector<Int>(S * S, Int(0))};
    for (std::size_t xi = 0; xi < S; ++xi) {
      const std::int64_t x = ss.state(xi);
      std::vector<Int> w1(static_cast<std::size_t>(cp.k) + 1, Int(0));
      std::vector<Int> w2 = w1;
      for (std::int64_t h = 0; h <= cp.k; ++h) {
        w1[static_cast<std::size_t>(h)] =
            binom_exact(x, h) * binom_exact(cp.m - x, cp.k - h);
        w2[static_cast<std::size_t>(h)] =
            binom_exact(cp.r - x, h) * binom_exact(cp.n - cp.m - (cp.r - x), cp.k - h);
      }
      for (std::int64_t h1 = 0; h1 <= cp.k; ++h1) {
        if (w1[static_cast<std::size_t>(h1)] == 0) continue;
        for (std::int64_t h2 = 0; h2 <= cp.k; ++h2) {
          if (w2[static_cast<std::size_t>(h2)] == 0) continue;
          K.num[xi * S + ss.index(x - h1 + h2)] +=
              w1[static_cast<std::size_t>(h1)] * w2[static_cast<std::size_t>(h2)];
        }
      }
    }
    return K;
  }

  TransitionKernel<Rat> to_rational() const {
    TransitionKernel<Rat> K{params, states, std::vector<Rat>(num.size(), Rat(0))};
    for (std::size_t i = 0; i < num.size(); ++i) {
      Rat q(num[i], den);
      q.canonicalize();
      K.p[i] = q;
    }
    return K;
  }
};

}  // namespace blmix
