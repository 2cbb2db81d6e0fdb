#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <blmix/dn_approx.hpp>
#include <blmix/verify_suites.hpp>

using namespace blmix;

TEST_CASE("discrete normal pmf") {
  SUBCASE("symmetric about zeta = k/2") {
    const auto dn = make_discrete_normal(10.0, 2.0, 20);
    for (std::int64_t j = 0; j <= 20; ++j)
      CHECK(dn_pmf(dn, j) == doctest::Approx(dn_pmf(dn, 20 - j)).epsilon(1e-14));
  }
  SUBCASE("sums to one by construction") {
    for (auto [zeta, xi, k] : {std::tuple<double, double, std::int64_t>{10.0, 2.0, 20},
                               std::tuple<double, double, std::int64_t>{3.3, 0.7, 9},
                               std::tuple<double, double, std::int64_t>{50.0, 7.0, 120}}) {
      const auto dn = make_discrete_normal(zeta, xi, k);
      double s = 0;
      for (std::int64_t j = 0; j <= k; ++j) s += dn_pmf(dn, j);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("density ratio phi(0)/phi(1) = e^{1/2}") {
    const auto dn = make_discrete_normal(10.0, 2.0, 20);
    CHECK(dn_pmf(dn, 10) / dn_pmf(dn, 12) ==
          doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  }
  SUBCASE("zero outside the support") {
    const auto dn = make_discrete_normal(10.0, 2.0, 20);
    CHECK(dn_pmf(dn, -1) == 0.0);
    CHECK(dn_pmf(dn, 21) == 0.0);
  }
  SUBCASE("flat-density limit of the normalizer") {
    // xi >> k: every term is phi(~0)/xi, so N -> (k+1) phi(0) / xi
    const auto dn = make_discrete_normal(10.0, 1e6, 20);
    const double flat = 21.0 * normal_density(0.0) / 1e6;
    CHECK(dn.normalizer == doctest::Approx(flat).epsilon(1e-9));
  }
  SUBCASE("invalid scale") {
    CHECK_THROWS_AS(make_discrete_normal(0.0, 0.0, 5), param_error);
    CHECK_THROWS_AS(make_discrete_normal(0.0, -1.0, 5), param_error);
  }
}

TEST_CASE("llt parameters") {
  SUBCASE("sigma is clamped at one") {
    const auto lp = llt_params({100, 50, 50, 2}, 25);
    CHECK(lp.p == 0.5);
    CHECK(lp.sigma == 1.0);  // kpq(1-k/n) = 0.49 < 1
  }
  SUBCASE("sigma above the clamp") {
    const auto lp = llt_params({1000, 500, 500, 20}, 250);
    CHECK(lp.sigma ==
          doctest::Approx(std::sqrt(20.0 * 0.25 * 0.98)).epsilon(1e-15));
  }
  SUBCASE("l out of range") {
    CHECK_THROWS_AS(llt_params({100, 50, 50, 2}, 51), param_error);
    CHECK_THROWS_AS(llt_params({100, 50, 50, 2}, -1), param_error);
  }
}

TEST_CASE("llt total variation") {
  SUBCASE("degenerate hypergeometric at l = 0") {
    const ChainParams p{100, 50, 50, 10};
    const double tv = llt_tv(p, 0);
    const auto dn = make_discrete_normal(0.0, 1.0, 10);
    CHECK(tv == doctest::Approx(1.0 - dn_pmf(dn, 0)).epsilon(1e-14));
  }
  SUBCASE("always a metric value in [0,1]") {
    for (std::int64_t l : {0, 10, 25, 40, 50}) {
      const double tv = llt_tv({100, 50, 50, 10}, l);
      CHECK(tv >= 0.0);
      CHECK(tv <= 1.0);
    }
  }
  SUBCASE("reflection symmetry l <-> m - l") {
    const ChainParams p{200, 80, 100, 12};
    CHECK(llt_tv(p, 15) == doctest::Approx(llt_tv(p, 65)).epsilon(1e-13));
    CHECK(llt_tv(p, 0) == doctest::Approx(llt_tv(p, 80)).epsilon(1e-13));
  }
  SUBCASE("reference value is small near the stationary mean") {
    const double tv = llt_tv({1000, 500, 500, 20}, 250);
    CHECK(tv > 0.0);
    CHECK(tv < 0.1);
  }
}

TEST_CASE("scaling reports") {
  SUBCASE("normalizer deviation bounded by 5/sqrt(n)") {
    const auto rows =
        normalizer_check(ratio_sequence({0.02, 0.5, 0.5}, n_range(100, 2000, 100)));
    REQUIRE(rows.size() == 20);
    for (const auto& row : rows) CHECK(row.value <= 5.0);
  }
  SUBCASE("sqrt(n) TV has no growth trend") {
    for (const RatioTriple t : {RatioTriple{0.02, 0.5, 0.5}, RatioTriple{0.10, 0.4, 0.4}}) {
      const auto rows = llt_decay_check(ratio_sequence(t, n_range(100, 2000, 100)));
      std::vector<double> vals;
      for (const auto& row : rows) {
        CHECK(row.value > 0.0);
        CHECK(std::isfinite(row.value));
        vals.push_back(row.value);
      }
      auto sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      CHECK(vals.back() <= 2.0 * sorted[sorted.size() / 2]);
    }
  }
  SUBCASE("single-instance sanity at n = 100") {
    const auto rows = llt_decay_check(ratio_sequence({0.02, 0.5, 0.5}, {100}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].value > 0.0);
    CHECK(std::isfinite(rows[0].value));
  }
}

TEST_CASE("verify_llt suite is green") {
  const auto checks = verify_llt();
  for (const auto& c : checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
  }
}
