#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/kernel.hpp"
#include "blmix/params.hpp"

namespace blmix {

enum class Regime { generic, critical, non_mixing };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::generic: return "generic";
    case Regime::critical: return "critical";
    default: return "non-mixing";
  }
}

// |lambda1| <= C/sqrt(n) classifies an instance as critical; C fixed at 10.
inline constexpr double critical_threshold_coeff = 10.0;

// lambda1 = 1 - nk/(m(n-m)), as an exact fraction num/den.
inline Rat lambda1_exact(const ChainParams& p) {
  Int den = Int(p.m) * (p.n - p.m);
  Rat q(den - Int(p.k) * p.n, den);
  q.canonicalize();
  return q;
}

inline bool lambda2_defined(const ChainParams& p) {
  return p.m >= 2 && p.n - p.m >= 2;
}

// lambda2 = 1 - 2(n-1)k/(m(n-m)) + (n-1)(n-2)k(k-1)/(m(m-1)(n-m)(n-m-1)).
inline Rat lambda2_exact(const ChainParams& p) {
  if (!lambda2_defined(p))
    throw param_error("lambda2 undefined: need m >= 2 and n-m >= 2");
  const Int den = Int(p.m) * (p.m - 1) * (p.n - p.m) * (p.n - p.m - 1);
  const Int num = den - Int(2) * (p.n - 1) * p.k * (p.m - 1) * (p.n - p.m - 1) +
                  Int(p.n - 1) * (p.n - 2) * p.k * (p.k - 1);
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Regime regime_of(const ChainParams& p) {
  p.validate();
  if (p.full_deterministic_swap()) return Regime::non_mixing;
  const Rat l1 = lambda1_exact(p);
  if (l1 == 0) return Regime::critical;
  if (std::fabs(rat_to_double(l1)) <=
      critical_threshold_coeff / std::sqrt(static_cast<double>(p.n)))
    return Regime::critical;
  return Regime::generic;
}

// Right eigenfunction values. s1 needs r, m >= 1; s2 needs r, m >= 2.
inline Rat s1_exact(const ChainParams& p, std::int64_t x) {
  if (p.r < 1) throw param_error("s1 undefined for r = 0");
  Rat q(Int(p.r) * p.m - Int(p.n) * x, Int(p.r) * p.m);
  q.canonicalize();
  return q;
}

inline Rat s2_exact(const ChainParams& p, std::int64_t x) {
  if (p.r < 2 || p.m < 2) throw param_error("s2 undefined: need r >= 2 and m >= 2");
  const Int den = Int(p.r) * (p.r - 1) * p.m * (p.m - 1);
  const Int num = den - Int(2) * (p.n - 1) * x * (p.r - 1) * (p.m - 1) +
                  Int(p.n - 1) * (p.n - 2) * x * (x - 1);
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline double s1_value(const ChainParams& p, std::int64_t x) {
  if (p.r < 1) throw param_error("s1 undefined for r = 0");
  return 1.0 - static_cast<double>(p.n) /
                   (static_cast<double>(p.r) * static_cast<double>(p.m)) *
                   static_cast<double>(x);
}

inline double s2_value(const ChainParams& p, std::int64_t x) {
  if (p.r < 2 || p.m < 2) throw param_error("s2 undefined: need r >= 2 and m >= 2");
  const double n = static_cast<double>(p.n), r = static_cast<double>(p.r),
               m = static_cast<double>(p.m), xd = static_cast<double>(x);
  return 1.0 - 2.0 * (n - 1) / (r * m) * xd +
         (n - 1) * (n - 2) / (r * (r - 1) * m * (m - 1)) * xd * (xd - 1);
}

struct BCoefficients {
  double b0, b1, b2;
};

// s1^2 = b0 + b1 s1 + b2 s2; requires n >= 3 and r, m >= 1. b2 vanishes for
// r = 1 or m = 1, which is exactly when s2 is undefined.
inline BCoefficients b_coefficients(const ChainParams& p) {
  if (p.n < 3) throw param_error("b coefficients need n >= 3");
  if (p.r < 1) throw param_error("b coefficients need r >= 1");
  const double n = static_cast<double>(p.n), r = static_cast<double>(p.r),
               m = static_cast<double>(p.m);
  return {(n - m) * (n - r) / ((n - 1) * r * m),
          -(n - 2 * r) * (n - 2 * m) / ((n - 2) * r * m),
          n * n * (r - 1) * (m - 1) / ((n - 1) * (n - 2) * r * m)};
}

// t_n = log(n) / (2 |log|lambda1||). Undefined at lambda1 = 0 (critical, use
// q_n) and |lambda1| = 1 (full deterministic swap).
inline double t_n(const ChainParams& p) {
  p.validate();
  const Int den = Int(p.m) * (p.n - p.m);
  const Int num = den - Int(p.k) * p.n;
  if (num == 0)
    throw regime_error(regime_error::kind::critical,
                       "t_n undefined: lambda1 = 0; use q_n instead");
  if (num == den || num == -den)
    throw regime_error(regime_error::kind::non_mixing,
                       "t_n undefined: |lambda1| = 1 (chain does not mix)");
  const double lam1 = rat_to_double(Rat(num, den));
  return std::log(static_cast<double>(p.n)) / (2.0 * std::fabs(std::log(std::fabs(lam1))));
}

// q_n = log(n)/|log|lambda2||, or 1 when lambda2 = 0.
inline double q_n_from_lambda2(const Rat& lambda2, std::int64_t n) {
  if (lambda2 == 0) return 1.0;
  const double a = std::fabs(rat_to_double(lambda2));
  if (a == 1.0)
    throw regime_error(regime_error::kind::non_mixing, "q_n undefined: |lambda2| = 1");
  return std::log(static_cast<double>(n)) / std::fabs(std::log(a));
}

inline double q_n(const ChainParams& p) {
  p.validate();
  return q_n_from_lambda2(lambda2_exact(p), p.n);
}

struct SpectralData {
  ChainParams params;
  double lambda1 = 0;
  std::optional<double> lambda2;
  double b0 = 0, b1 = 0, b2 = 0;
  std::optional<double> t_n;
  std::optional<double> q_n;
  Regime regime = Regime::generic;
};

inline SpectralData eigen_data(const ChainParams& p) {
  p.validate();
  if (p.n < 3) throw param_error("eigen_data: needs n >= 3");
  if (p.r < 1) throw param_error("eigen_data: needs r >= 1");
  SpectralData sd;
  sd.params = p;
  sd.lambda1 = rat_to_double(lambda1_exact(p));
  if (lambda2_defined(p)) sd.lambda2 = rat_to_double(lambda2_exact(p));
  const auto b = b_coefficients(p);
  sd.b0 = b.b0;
  sd.b1 = b.b1;
  sd.b2 = b.b2;
  try {
    sd.t_n = t_n(p);
  } catch (const regime_error&) {
  }
  if (lambda2_defined(p)) {
    try {
      sd.q_n = q_n(p);
    } catch (const regime_error&) {
      // |lambda2| = 1 at the full deterministic swap
    }
  }
  sd.regime = regime_of(p);
  return sd;
}

// Max over x of |sum_y p(x,y) s_i(y) - lambda_i s_i(x)|, float kernel.
inline double verify_eigen_identity(const TransitionKernel<double>& K, int which) {
  const ChainParams& p = K.params;
  const std::size_t S = K.size();
  const Rat lam_exact = which == 1 ? lambda1_exact(p) : lambda2_exact(p);
  const double lam = rat_to_double(lam_exact);
  std::vector<double> s(S);
  for (std::size_t i = 0; i < S; ++i)
    s[i] = which == 1 ? s1_value(p, K.states.state(i)) : s2_value(p, K.states.state(i));
  double worst = 0.0;
  for (std::size_t xi = 0; xi < S; ++xi) {
    const double* row = K.row(xi);
    double acc = 0.0, comp = 0.0;
    for (std::size_t yi = 0; yi < S; ++yi) {
      double term = row[yi] * s[yi] - comp;
      double t = acc + term;
      comp = (t - acc) - term;
      acc = t;
    }
    worst = std::max(worst, std::fabs(acc - lam * s[xi]));
  }
  return worst;
}

// Exact version: residual row x is (lam_den * sum_y num[x][y] s_num(y)
//                                   - lam_num * den * s_num(x)) / (den s_den lam_den).
inline Rat verify_eigen_identity(const ExactKernel& K, int which) {
  const ChainParams& p = K.params;
  const std::size_t S = K.size();
  const Rat lam = which == 1 ? lambda1_exact(p) : lambda2_exact(p);
  std::vector<Int> sn(S);
  Int sden;
  if (which == 1) {
    sden = Int(p.r) * p.m;
    for (std::size_t i = 0; i < S; ++i)
      sn[i] = sden - Int(p.n) * K.states.state(i);
  } else {
    if (p.r < 2 || p.m < 2) throw param_error("s2 undefined: need r >= 2 and m >= 2");
    sden = Int(p.r) * (p.r - 1) * p.m * (p.m - 1);
    for (std::size_t i = 0; i < S; ++i) {
      const std::int64_t x = K.states.state(i);
      sn[i] = sden - Int(2) * (p.n - 1) * x * (p.r - 1) * (p.m - 1) +
              Int(p.n - 1) * (p.n - 2) * x * (x - 1);
    }
  }
  const Int lam_num = lam.get_num(), lam_den = lam.get_den();
  Rat worst(0);
  for (std::size_t xi = 0; xi < S; ++xi) {
    Int acc(0);
    const Int* row = K.num.data() + xi * S;
    for (std::size_t yi = 0; yi < S; ++yi)
      if (row[yi] != 0) acc += row[yi] * sn[yi];
    Rat resid(lam_den * acc - lam_num * K.den * sn[xi], K.den * sden * lam_den);
    resid.canonicalize();
    if (abs(resid) > worst) worst = abs(resid);
  }
  return worst;
}

// Max over x of |s1(x)^2 - (b0 + b1 s1(x) + b2 s2(x))|; the b2 s2 term is 0
// by convention when r = 1 or m = 1 (b2 vanishes there).
inline double s1_squared_decomposition_check(const ChainParams& p) {
  p.validate();
  const auto b = b_coefficients(p);
  const StateSpace ss = p.state_space();
  const bool has_s2 = p.r >= 2 && p.m >= 2;
  double worst = 0.0;
  for (std::int64_t x = ss.lo; x <= ss.hi; ++x) {
    const double v1 = s1_value(p, x);
    const double rhs = b.b0 + b.b1 * v1 + (has_s2 ? b.b2 * s2_value(p, x) : 0.0);
    worst = std::max(worst, std::fabs(v1 * v1 - rhs));
  }
  return worst;
}

inline Rat s1_squared_decomposition_check_exact(const ChainParams& p) {
  p.validate();
  if (p.n < 3 || p.r < 1) throw param_error("decomposition needs n >= 3 and r >= 1");
  const Int n = p.n, r = p.r, m = p.m;
  Rat b0(Int(n - m) * (n - r), Int(n - 1) * r * m);
  Rat b1(-Int(n - 2 * r) * (n - 2 * m), Int(n - 2) * r * m);
  Rat b2(n * n * (r - 1) * (m - 1), Int(n - 1) * (n - 2) * r * m);
  b0.canonicalize();
  b1.canonicalize();
  b2.canonicalize();
  const bool has_s2 = p.r >= 2 && p.m >= 2;
  const StateSpace ss = p.state_space();
  Rat worst(0);
  for (std::int64_t x = ss.lo; x <= ss.hi; ++x) {
    const Rat v1 = s1_exact(p, x);
    Rat rhs = b0 + b1 * v1;
    if (has_s2) rhs += b2 * s2_exact(p, x);
    Rat resid = abs(v1 * v1 - rhs);
    if (resid > worst) worst = resid;
  }
  return worst;
}

struct ScalingCheckRow {
  std::int64_t n = 0;
  double gap = 0;           // lambda1^2 - lambda2
  bool gap_nonneg = false;  // sign decided in exact arithmetic
  double n_gap = 0;
  std::optional<double> n_abs_lambda2_pow_tn;  // skipped when t_n or lambda2 undefined
};

struct ScalingCheckReport {
  std::vector<ScalingCheckRow> rows;
  std::size_t skipped = 0;
};

// Scaling checks along a parameter sequence: lambda1^2 - lambda2 >= 0 and
// n(lambda1^2 - lambda2) bounded; n |lambda2|^{t_n} bounded in the generic case.
inline ScalingCheckReport eigenvalue_scaling_report(const std::vector<ChainParams>& seq) {
  ScalingCheckReport rep;
  for (const ChainParams& p : seq) {
    p.validate();
    if (!lambda2_defined(p)) {
      ++rep.skipped;
      continue;
    }
    ScalingCheckRow row;
    row.n = p.n;
    const Rat gap = lambda1_exact(p) * lambda1_exact(p) - lambda2_exact(p);
    row.gap = rat_to_double(gap);
    row.gap_nonneg = gap >= 0;
    row.n_gap = static_cast<double>(p.n) * row.gap;
    try {
      const double tn = t_n(p);
      const double l2 = std::fabs(rat_to_double(lambda2_exact(p)));
      row.n_abs_lambda2_pow_tn =
          static_cast<double>(p.n) * (l2 == 0.0 ? 0.0 : std::pow(l2, tn));
    } catch (const regime_error&) {
      ++rep.skipped;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace blmix
