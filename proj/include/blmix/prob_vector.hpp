#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/params.hpp"

namespace blmix {

// A probability distribution over a chain's state space. Scalar is double
// (float backend) or Rat (exact backend).
template <class Scalar>
struct ProbVector {
  StateSpace support;
  std::vector<Scalar> w;

  explicit ProbVector(StateSpace s = {})
      : support(s), w(s.hi >= s.lo ? s.size() : 0, Scalar(0)) {}

  Scalar& at_state(std::int64_t x) {
    if (!support.contains(x)) throw state_error("state outside support");
    return w[support.index(x)];
  }
  const Scalar& at_state(std::int64_t x) const {
    if (!support.contains(x)) throw state_error("state outside support");
    return w[support.index(x)];
  }

  static ProbVector point_mass(StateSpace s, std::int64_t x) {
    ProbVector pv(s);
    pv.at_state(x) = Scalar(1);
    return pv;
  }
};

namespace detail {

inline double kahan_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

template <class Scalar>
Scalar prob_sum(const ProbVector<Scalar>& p) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return detail::kahan_sum(p.w);
  } else {
    Scalar s(0);
    for (const auto& x : p.w) s += x;
    return s;
  }
}

// Half-L1 distance; equals sup_A |a(A) - b(A)| for distributions.
template <class Scalar>
Scalar tv_distance(const ProbVector<Scalar>& a, const ProbVector<Scalar>& b) {
  if (a.support != b.support)
    throw shape_error("tv_distance: supports differ");
  if constexpr (std::is_same_v<Scalar, double>) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      double y = std::fabs(a.w[i] - b.w[i]) - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return 0.5 * s;
  } else {
    Scalar s(0);
    for (std::size_t i = 0; i < a.w.size(); ++i) s += abs(a.w[i] - b.w[i]);
    return s / 2;
  }
}

}  // namespace blmix
