#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "blmix/errors.hpp"

namespace blmix {

// Contiguous integer range of chain states (red-ball counts in the left urn).
struct StateSpace {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(std::int64_t x) const { return x >= lo && x <= hi; }
  std::size_t index(std::int64_t x) const {
    return static_cast<std::size_t>(x - lo);
  }
  std::int64_t state(std::size_t i) const {
    return lo + static_cast<std::int64_t>(i);
  }
  bool operator==(const StateSpace&) const = default;
};

// Two urns holding n balls total, r of them red; the left urn holds m balls
// and every step swaps k uniformly chosen balls between the urns.
struct ChainParams {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t r = 0;
  std::int64_t k = 0;

  void validate() const {
    if (n < 2) throw param_error("chain: need n >= 2, got n=" + std::to_string(n));
    if (m < 1 || m > n - 1)
      throw param_error("chain: need 1 <= m <= n-1, got m=" + std::to_string(m));
    if (r < 0 || r > n)
      throw param_error("chain: need 0 <= r <= n, got r=" + std::to_string(r));
    const std::int64_t kmax = std::min(m, n - m);
    if (k < 1 || k > kmax)
      throw param_error("chain: need 1 <= k <= min(m, n-m) = " +
                        std::to_string(kmax) + ", got k=" + std::to_string(k));
  }

  StateSpace state_space() const {
    return {std::max<std::int64_t>(0, r + m - n), std::min(m, r)};
  }

  // Canonical form has r <= n/2 and m <= n/2; the color/urn swap symmetries
  // reduce any valid instance to it.
  bool canonical() const { return 2 * r <= n && 2 * m <= n; }

  bool full_deterministic_swap() const { return k == m && m == n - m; }

  bool operator==(const ChainParams&) const = default;
};

// Affine state relabeling x -> sign*x + offset.
struct StateRelabel {
  int sign = 1;
  std::int64_t offset = 0;

  std::int64_t operator()(std::int64_t x) const { return sign * x + offset; }

  static StateRelabel compose(const StateRelabel& outer, const StateRelabel& inner) {
    return {outer.sign * inner.sign, outer.sign * inner.offset + outer.offset};
  }
};

struct CanonicalChain {
  ChainParams params;
  StateRelabel to_canonical;  // maps raw states to canonical states
};

// Color swap: r -> n-r relabels state x -> m-x (count whites instead).
// Urn swap: m -> n-m relabels state x -> r-x (count the right urn).
// k is preserved by both, as is its bound min(m, n-m).
inline CanonicalChain canonicalize(ChainParams p) {
  p.validate();
  StateRelabel map{};
  if (2 * p.r > p.n) {
    map = StateRelabel::compose({-1, p.m}, map);
    p.r = p.n - p.r;
  }
  if (2 * p.m > p.n) {
    map = StateRelabel::compose({-1, p.r}, map);
    p.m = p.n - p.m;
  }
  return {p, map};
}

}  // namespace blmix
