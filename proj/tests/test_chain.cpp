#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include <blmix/hypergeom.hpp>
#include <blmix/kernel.hpp>
#include <blmix/params.hpp>
#include <blmix/prob_vector.hpp>
#include <blmix/rng.hpp>

#include "oracle_helpers.hpp"

using namespace blmix;

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((ChainParams{4, 2, 2, 1}.validate()));
  CHECK_THROWS_AS((ChainParams{1, 1, 0, 1}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 0, 5, 1}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 10, 5, 1}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 5, -1, 1}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 5, 11, 1}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 5, 5, 0}.validate()), param_error);
  CHECK_THROWS_AS((ChainParams{10, 3, 5, 4}.validate()), param_error);  // k > min(m, n-m)
}

TEST_CASE("state space bounds") {
  CHECK((ChainParams{4, 2, 2, 1}.state_space() == StateSpace{0, 2}));
  // r + m > n pushes the floor above zero
  CHECK((ChainParams{10, 5, 7, 2}.state_space() == StateSpace{2, 5}));
  CHECK((ChainParams{10, 5, 7, 2}.canonical() == false));
  CHECK((ChainParams{10, 5, 5, 2}.canonical() == true));
}

TEST_CASE("canonicalization maps states affinely") {
  SUBCASE("color swap") {
    const auto c = canonicalize({10, 4, 7, 2});
    CHECK((c.params == ChainParams{10, 4, 3, 2}));
    CHECK(c.to_canonical(1) == 3);  // x -> m - x
    CHECK(c.to_canonical(4) == 0);
  }
  SUBCASE("urn swap") {
    const auto c = canonicalize({10, 7, 4, 2});
    CHECK((c.params == ChainParams{10, 3, 4, 2}));
    CHECK(c.to_canonical(1) == 3);  // x -> r - x
  }
  SUBCASE("both swaps") {
    const auto c = canonicalize({10, 7, 7, 2});
    CHECK((c.params == ChainParams{10, 3, 3, 2}));
    CHECK(c.to_canonical.sign == 1);
    CHECK(c.to_canonical(4) == 0);  // x -> x + n - r - m
    CHECK(c.to_canonical(7) == 3);
  }
  SUBCASE("already canonical is untouched") {
    const auto c = canonicalize({10, 4, 3, 2});
    CHECK((c.params == ChainParams{10, 4, 3, 2}));
    CHECK(c.to_canonical(2) == 2);
  }
  SUBCASE("random instances land canonical with a bijective state map") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const std::int64_t n = 4 + static_cast<std::int64_t>(rng.next() % 60);
      const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n - 1));
      const std::int64_t r = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n + 1));
      const std::int64_t kmax = std::min(m, n - m);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(kmax));
      const ChainParams p{n, m, r, k};
      const auto c = canonicalize(p);
      CHECK(c.params.canonical());
      const StateSpace raw = p.state_space(), can = c.params.state_space();
      CHECK(raw.size() == can.size());
      CHECK(can.contains(c.to_canonical(raw.lo)));
      CHECK(can.contains(c.to_canonical(raw.hi)));
    }
  }
}

TEST_CASE("hypergeometric pmf") {
  SUBCASE("direct counts") {
    CHECK(hypergeom_pmf(4, 2, 2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(hypergeom_pmf(4, 2, 2, 3) == 0.0);
    CHECK(hypergeom_pmf_exact(4, 2, 2, 1) == Rat(2, 3));
  }
  SUBCASE("float agrees with the exact backend at n = 1000") {
    const double f = hypergeom_pmf(1000, 500, 20, 10);
    const double e = rat_to_double(hypergeom_pmf_exact(1000, 500, 20, 10));
    CHECK(std::fabs(f - e) / e <= 1e-13);
  }
  SUBCASE("bad bounds raise parameter errors") {
    CHECK_THROWS_AS(hypergeom_pmf(4, 5, 2, 1), param_error);
    CHECK_THROWS_AS(hypergeom_pmf(4, 2, 5, 1), param_error);
    CHECK_THROWS_AS(hypergeom_pmf_exact(4, -1, 2, 1), param_error);
  }
  SUBCASE("pmf sums to one") {
    for (auto [N, K, d] : {std::array<std::int64_t, 3>{30, 12, 7},
                           std::array<std::int64_t, 3>{100, 37, 50},
                           std::array<std::int64_t, 3>{9, 9, 4}}) {
      double fsum = 0;
      Rat esum(0);
      for (std::int64_t j = 0; j <= d; ++j) {
        fsum += hypergeom_pmf(N, K, d, j);
        esum += hypergeom_pmf_exact(N, K, d, j);
      }
      CHECK(fsum == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(esum == 1);
    }
  }
  SUBCASE("inverse-CDF sampler stays in support and matches the mean") {
    SplitMix64 rng(11);
    const std::int64_t N = 40, K = 15, d = 9;
    const auto sup = hyp_support(N, K, d);
    double sum = 0;
    const int T = 200000;
    for (int i = 0; i < T; ++i) {
      const auto v = sample_hypergeom(N, K, d, rng);
      CHECK(v >= sup.lo);
      CHECK(v <= sup.hi);
      sum += static_cast<double>(v);
    }
    const double mean = static_cast<double>(K) * d / N;
    const double sd = std::sqrt(static_cast<double>(d) * (K / 40.0) * (25.0 / 40.0) *
                                (40.0 - d) / 39.0);
    CHECK(std::fabs(sum / T - mean) <= 4.0 * sd / std::sqrt(static_cast<double>(T)));
  }
  SUBCASE("huge populations route through the sequential fallback") {
    SplitMix64 rng(13);
    const std::int64_t N = 10000, K = 5000, d = 5000;
    CHECK(hypergeom_pmf(N, K, d, 0) < 1e-290);  // the walk's start underflows
    double sum = 0;
    const int T = 400;
    for (int i = 0; i < T; ++i) {
      const auto v = sample_hypergeom(N, K, d, rng);
      CHECK(v >= 0);
      CHECK(v <= d);
      sum += static_cast<double>(v);
    }
    // mean 2500, sd ~ 25; the sample mean sits within 5 sd / sqrt(T)
    CHECK(std::fabs(sum / T - 2500.0) <= 5.0 * 25.0 / std::sqrt(static_cast<double>(T)));
  }
}

TEST_CASE("transition rows") {
  const ChainParams p{4, 2, 2, 1};
  SUBCASE("deterministic row at the floor") {
    const auto row = transition_row<double>(p, 0);
    CHECK(row.w[0] == 0.0);
    CHECK(row.w[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(row.w[2] == 0.0);
  }
  SUBCASE("interior row equals the brute-force swap enumeration") {
    const auto row = transition_row<Rat>(p, 1);
    const auto law = oracle::transition_law(p, 1);
    CHECK(row.at_state(0) == law.at(0));
    CHECK(row.at_state(1) == law.at(1));
    CHECK(row.at_state(2) == law.at(2));
    CHECK(row.at_state(0) == Rat(1, 4));
    CHECK(row.at_state(1) == Rat(1, 2));
    CHECK(row.at_state(2) == Rat(1, 4));
  }
  SUBCASE("rows sum to one") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const std::int64_t n = 6 + static_cast<std::int64_t>(rng.next() % 80);
      const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n - 1));
      const std::int64_t r = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n + 1));
      const std::int64_t kmax = std::min(m, n - m);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(kmax));
      const ChainParams q{n, m, r, k};
      const StateSpace ss = q.state_space();
      const std::int64_t x =
          ss.lo + static_cast<std::int64_t>(rng.next() % ss.size());
      CHECK(prob_sum(transition_row<double>(q, x)) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("exact rows sum to exactly one") {
    for (std::int64_t x = 0; x <= 2; ++x)
      CHECK(prob_sum(transition_row<Rat>(p, x)) == 1);
  }
  SUBCASE("states outside the space are rejected") {
    CHECK_THROWS_AS(transition_row<double>(p, 3), state_error);
    CHECK_THROWS_AS(transition_row<double>(p, -1), state_error);
  }
}

TEST_CASE("kernel construction") {
  SUBCASE("4-ball kernel matches the enumeration oracle row by row") {
    const ChainParams p{4, 2, 2, 1};
    const auto K = build_kernel<Rat>(p);
    for (std::int64_t x = 0; x <= 2; ++x) {
      const auto law = oracle::transition_law(p, x);
      for (std::int64_t y = 0; y <= 2; ++y) {
        const auto it = law.find(y);
        CHECK(K.at(x, y) == (it == law.end() ? Rat(0) : it->second));
      }
    }
  }
  SUBCASE("full deterministic swap maps x to 3 - x") {
    const auto K = build_kernel<Rat>({6, 3, 3, 3});
    for (std::int64_t x = 0; x <= 3; ++x)
      for (std::int64_t y = 0; y <= 3; ++y)
        CHECK(K.at(x, y) == (y == 3 - x ? Rat(1) : Rat(0)));
  }
  SUBCASE("shape, row sums and band support at n = 50") {
    const ChainParams p{50, 25, 25, 1};
    const auto K = build_kernel<double>(p);
    CHECK(K.size() == 26);
    for (std::int64_t x = 0; x <= 25; ++x) {
      CHECK(prob_sum(K.row_vector(x)) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::int64_t y = 0; y <= 25; ++y)
        if (std::llabs(x - y) > p.k) CHECK(K.at(x, y) == 0.0);
    }
  }
  SUBCASE("integer kernel equals the rational kernel") {
    const ChainParams p{10, 4, 5, 2};
    const auto KR = build_kernel<Rat>(p);
    const auto KE = ExactKernel::build(p).to_rational();
    for (std::size_t i = 0; i < KR.p.size(); ++i) CHECK(KR.p[i] == KE.p[i]);
  }
  SUBCASE("float and exact kernels agree to 1e-12 relative for n <= 64") {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
      const std::int64_t n = 8 + static_cast<std::int64_t>(rng.next() % 57);
      const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n - 1));
      const std::int64_t r = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(n + 1));
      const std::int64_t kmax = std::min(m, n - m);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(kmax));
      const ChainParams p{n, m, r, k};
      const auto KF = build_kernel<double>(p);
      const auto KE = ExactKernel::build(p);
      const std::size_t S = KF.size();
      for (std::size_t i = 0; i < S * S; ++i) {
        Rat e(KE.num[i], KE.den);
        e.canonicalize();
        if (e == 0) {
          CHECK(KF.p[i] == 0.0);
        } else {
          CHECK(std::fabs(KF.p[i] - rat_to_double(e)) / rat_to_double(e) <= 1e-12);
        }
      }
    }
  }
  SUBCASE("canonicalized kernel is the relabeled raw kernel") {
    for (const ChainParams raw : {ChainParams{10, 4, 7, 2}, ChainParams{10, 7, 4, 2},
                                  ChainParams{10, 7, 7, 2}, ChainParams{13, 9, 8, 3}}) {
      const auto c = canonicalize(raw);
      const auto KR = build_kernel<Rat>(raw);
      const auto KC = build_kernel<Rat>(c.params);
      const StateSpace ss = raw.state_space();
      for (std::int64_t x = ss.lo; x <= ss.hi; ++x)
        for (std::int64_t y = ss.lo; y <= ss.hi; ++y)
          CHECK(KR.at(x, y) == KC.at(c.to_canonical(x), c.to_canonical(y)));
    }
  }
}

TEST_CASE("stationary distribution") {
  SUBCASE("4-ball chain") {
    const auto pi = stationary_pmf<Rat>({4, 2, 2, 1});
    CHECK(pi.at_state(0) == Rat(1, 6));
    CHECK(pi.at_state(1) == Rat(2, 3));
    CHECK(pi.at_state(2) == Rat(1, 6));
  }
  SUBCASE("pi P = pi") {
    for (const ChainParams p : {ChainParams{50, 25, 25, 1}, ChainParams{20, 8, 5, 3},
                                ChainParams{31, 11, 14, 5}}) {
      const auto K = build_kernel<double>(p);
      const auto pi = stationary_pmf<double>(p);
      const std::size_t S = K.size();
      for (std::size_t y = 0; y < S; ++y) {
        double acc = 0;
        for (std::size_t x = 0; x < S; ++x) acc += pi.w[x] * K.p[x * S + y];
        CHECK(std::fabs(acc - pi.w[y]) <= 1e-11);
      }
    }
  }
  SUBCASE("pi P = pi exactly in rationals") {
    const ChainParams p{12, 5, 4, 2};
    const auto K = build_kernel<Rat>(p);
    const auto pi = stationary_pmf<Rat>(p);
    const std::size_t S = K.size();
    for (std::size_t y = 0; y < S; ++y) {
      Rat acc(0);
      for (std::size_t x = 0; x < S; ++x) acc += pi.w[x] * K.p[x * S + y];
      CHECK(acc == pi.w[y]);
    }
  }
  SUBCASE("hypergeometric mean rm/n") {
    const auto pi = stationary_pmf<double>({50, 25, 25, 1});
    double mean = 0;
    for (std::size_t i = 0; i < pi.w.size(); ++i)
      mean += static_cast<double>(pi.support.state(i)) * pi.w[i];
    CHECK(std::fabs(mean - 12.5) <= 1e-10);
  }
}

TEST_CASE("probability vectors and total variation") {
  const StateSpace ss{0, 4};
  const auto d0 = ProbVector<double>::point_mass(ss, 0);
  const auto d1 = ProbVector<double>::point_mass(ss, 1);
  CHECK(tv_distance(d0, d0) == 0.0);
  CHECK(tv_distance(d0, d1) == 1.0);
  const auto other = ProbVector<double>(StateSpace{0, 5});
  CHECK_THROWS_AS(tv_distance(d0, other), shape_error);
  CHECK_THROWS_AS(d0.at_state(9), state_error);
}
