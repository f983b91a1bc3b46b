#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "sparsefunc/errors.hpp"
#include "sparsefunc/rates.hpp"

using namespace sparsefunc;
using namespace sparsefunc::rates;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent scan in long double with an exact tie-break: when the two sides
// agree to 1e-15 the comparison is redone with both sides rounded to 12
// significant digits.
long long rescan_m(long double r, long double sigma, long double q, long long d) {
  long long m = 0;
  for (long long s = 1; s <= d; ++s) {
    const long double sd = static_cast<long double>(s);
    const long double lhs = sigma * sigma * std::log1p(static_cast<long double>(d) / (sd * sd));
    const long double rhs = r * r * std::pow(sd, -2.0L / q);
    if (lhs <= rhs) m = s;
  }
  return m;
}

}  // namespace

TEST_CASE("integer square-root comparisons") {
  CHECK(below_sqrt(9, 100));
  CHECK_FALSE(below_sqrt(10, 100));
  CHECK(at_most_sqrt(10, 100));
  CHECK_FALSE(at_most_sqrt(11, 100));
  CHECK(below_sqrt(10, 101));
  CHECK(floor_sqrt(99) == 9);
  CHECK(floor_sqrt(100) == 10);
  CHECK(ceil_sqrt(100) == 10);
  CHECK(ceil_sqrt(101) == 11);
  CHECK(floor_sqrt(1) == 1);
  const long long big = 3037000499LL;  // floor(sqrt(2^63 - 1))
  CHECK(floor_sqrt(big * big) == big);
  CHECK(floor_sqrt(big * big - 1) == big - 1);
  for (long long d = 1; d < 5000; ++d) {
    const long long r = floor_sqrt(d);
    CHECK((r * r <= d && (r + 1) * (r + 1) > d));
    for (long long s : {r - 1, r, r + 1}) {
      if (s < 1) continue;
      CHECK(below_sqrt(s, d) == (s * s < d));
      CHECK(at_most_sqrt(s, d) == (s * s <= d));
    }
  }
}

TEST_CASE("effective sparsity") {
  SECTION("empty set gives zero") {
    // r^2 < sigma^2 log(1 + d): s = 1 already fails, and so does every s.
    CHECK(effective_sparsity(0.5, 1.0, 1.0, 100) == 0);
  }
  SECTION("vanishing noise hits the cap") {
    CHECK(effective_sparsity(1.0, 1e-8, 0.5, 50) == 50);
  }
  SECTION("d = 100, sigma = 1, q = 1, r = 10 against an independent rescan") {
    // log(1 + u) <= u, so every s qualifies and m is the cap.
    CHECK(effective_sparsity(10.0, 1.0, 1.0, 100) == rescan_m(10.0L, 1.0L, 1.0L, 100));
    CHECK(effective_sparsity(10.0, 1.0, 1.0, 100) == 100);
  }
  SECTION("randomized rescans") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const double q = 0.05 + 1.95 * unif(gen);
      const double r = std::pow(10.0, -1.0 + 3.0 * unif(gen));
      const double sigma = std::pow(10.0, -1.0 + 2.0 * unif(gen));
      const long long d = 1 + static_cast<long long>(unif(gen) * 800);
      INFO("q=" << q << " r=" << r << " sigma=" << sigma << " d=" << d);
      CHECK(effective_sparsity(r, sigma, q, d) == rescan_m(r, sigma, q, d));
    }
  }
  SECTION("invalid parameters") {
    CHECK_THROWS_AS(effective_sparsity(1.0, 1.0, 0.0, 10), InvalidArgument);
    CHECK_THROWS_AS(effective_sparsity(1.0, 1.0, 2.5, 10), InvalidArgument);
    CHECK_THROWS_AS(effective_sparsity(-1.0, 1.0, 1.0, 10), InvalidArgument);
    CHECK_THROWS_AS(effective_sparsity(1.0, 0.0, 1.0, 10), InvalidArgument);
  }
}

TEST_CASE("effective sparsity is monotone in r and sigma") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const double q = 0.05 + 1.95 * unif(gen);
    const long long d = 1 + static_cast<long long>(unif(gen) * 400);
    const double sigma = 0.2 + unif(gen);
    long long prev = 0;
    for (double r = 0.05; r < 200.0; r *= 1.3) {
      const long long m = effective_sparsity(r, sigma, q, d);
      CHECK(m >= prev);
      prev = m;
    }
    const double r = 0.5 + 10.0 * unif(gen);
    prev = d + 1;
    for (double s = 0.01; s < 20.0; s *= 1.3) {
      const long long m = effective_sparsity(r, s, q, d);
      CHECK(m <= prev);
      prev = m;
    }
  }
}

TEST_CASE("linear rate on B0") {
  CHECK_THAT(rate_linear_B0(100, 100, 1.0).value, WithinRel(1e4 * std::log1p(0.01), 1e-14));
  CHECK(rate_linear_B0(100, 100, 1.0).zone == Zone::Dense);
  const auto r = rate_linear_B0(5, 100, 1.0);
  CHECK_THAT(r.value, WithinAbs(40.236, 1e-3));
  CHECK_THAT(r.value, WithinRel(25.0 * std::log(5.0), 1e-14));
  CHECK(r.zone == Zone::Sparse);
  CHECK(rate_linear_B0(10, 100, 1.0).zone == Zone::Dense);
  CHECK(rate_linear_B0(9, 100, 1.0).zone == Zone::Sparse);
  CHECK_THROWS_AS(rate_linear_B0(0, 10, 1.0), InvalidArgument);
  CHECK_THROWS_AS(rate_linear_B0(11, 10, 1.0), InvalidArgument);
}

TEST_CASE("linear rate is within a factor two of the min form") {
  for (long long d = 1; d <= 300; ++d) {
    for (long long s = 1; s <= d; ++s) {
      const auto r = rate_linear_B0(s, d, 1.3);
      const double mf = rate_linear_B0_min_form(s, d, 1.3);
      CHECK(mf <= r.value * (1.0 + 1e-14));
      CHECK(r.value <= 2.0 * mf * (1.0 + 1e-14));
      REQUIRE(r.equivalent.has_value());
      CHECK(*r.equivalent == mf);
      if (r.zone == Zone::Dense) CHECK(r.value >= 1.69 * static_cast<double>(d) / 2.0);
    }
  }
}

TEST_CASE("linear rate on l_q balls") {
  SECTION("degenerate") {
    const auto r = rate_linear_Bq(0.5, 1.0, 1.0, 100);
    CHECK(r.zone == Zone::Degenerate);
    CHECK(r.value == 0.25);
    CHECK(r.m == 0);
  }
  SECTION("compositional") {
    for (double q : {0.3, 0.7, 1.0}) {
      for (double rr : {1.5, 4.0, 20.0, 300.0}) {
        const long long m = effective_sparsity(rr, 0.8, q, 400);
        const auto r = rate_linear_Bq(rr, 0.8, q, 400);
        REQUIRE(r.m == m);
        if (m == 0) {
          CHECK(r.value == rr * rr);
        } else {
          const double md = static_cast<double>(m);
          CHECK_THAT(r.value, WithinRel(0.64 * md * md * std::log1p(400.0 / (md * md)), 1e-14));
          CHECK(r.zone == (m * m <= 400 ? Zone::Sparse : Zone::Dense));
          if (r.zone == Zone::Dense) CHECK_THAT(r.equivalent.value(), WithinRel(0.64 * 400.0, 1e-14));
        }
      }
    }
  }
  SECTION("q = 1 sparse zone is r^2 up to constants") {
    for (long long d : {100LL, 1000LL, 10000LL}) {
      for (double rr = 1.0; rr < 100.0; rr *= 1.2) {
        const auto r = rate_linear_Bq(rr, 1.0, 1.0, d);
        if (r.zone != Zone::Sparse) continue;
        CHECK(r.value <= rr * rr);
        CHECK(r.value >= rr * rr / 8.0);
      }
    }
  }
  SECTION("sparse zone matches the closed-form approximation up to constants") {
    // psi / (sigma^2 (r/sigma)^{2q} log^{1-q}(1 + d (sigma/r)^{2q})) stays in
    // [0.313, 1.099] on this grid; asserted with margin.
    for (double q : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      for (long long d : {100LL, 1000LL, 10000LL}) {
        for (double rr = 0.3; rr < 1000.0; rr *= 1.22) {
          const auto r = rate_linear_Bq(rr, 1.0, q, d);
          if (r.zone != Zone::Sparse) continue;
          const double ref = std::pow(rr, 2.0 * q) *
                             std::pow(std::log1p(static_cast<double>(d) * std::pow(rr, -2.0 * q)), 1.0 - q);
          INFO("q=" << q << " d=" << d << " r=" << rr);
          CHECK(r.value / ref >= 0.25);
          CHECK(r.value / ref <= 2.0);
        }
      }
    }
  }
  CHECK_THROWS_AS(rate_linear_Bq(1.0, 1.0, 1.5, 10), InvalidArgument);
}

TEST_CASE("quadratic rate") {
  SECTION("small kappa is the kappa^4 cap") {
    const auto r = rate_quadratic(3, 100, 1.0, 1e-3);
    CHECK(r.zone == Zone::ZeroEstimator);
    CHECK_THAT(r.value, WithinRel(1e-12, 1e-12));
  }
  SECTION("full class") {
    for (double kappa : {0.5, 3.0, 10.0, 50.0}) {
      const double expected = std::min(std::pow(kappa, 4), std::max(kappa * kappa, 100.0));
      CHECK_THAT(rate_quadratic(100, 100, 1.0, kappa).value, WithinRel(expected, 1e-14));
    }
  }
  SECTION("d = 100, s = 3, kappa = 10") {
    const double lg = std::log1p(100.0 / 9.0);
    CHECK_THAT(lg, WithinAbs(2.49412, 1e-5));
    CHECK_THAT(psi_bar(3, 100, 1.0), WithinAbs(55.9859, 1e-4));
    const auto r = rate_quadratic(3, 100, 1.0, 10.0);
    CHECK(r.value == 100.0);
    CHECK(r.zone == Zone::VarianceDominated);
  }
  SECTION("zones") {
    CHECK(rate_quadratic(3, 100, 1.0, 5.0).zone == Zone::Sparse);
    CHECK(rate_quadratic(50, 100, 1.0, 5.0).zone == Zone::Dense);
    CHECK(rate_quadratic(50, 100, 1.0, 20.0).zone == Zone::VarianceDominated);
  }
}

TEST_CASE("quadratic rate on l_q balls") {
  CHECK(rate_quadratic_Bq(0.5, 1.0, 1.0, 100).value == std::pow(0.5, 4));
  CHECK(rate_quadratic_Bq(0.5, 1.0, 1.0, 100).zone == Zone::Degenerate);
  // q = 1, r = 10: m = d = 100 > sqrt(100).
  const auto dense = rate_quadratic_Bq(10.0, 1.0, 1.0, 100);
  CHECK(dense.value == std::max(100.0, 100.0));
  CHECK(dense.m == 100);
  for (double q : {0.4, 1.0, 1.6}) {
    for (double rr : {1.5, 3.0, 8.0, 40.0}) {
      const long long m = effective_sparsity(rr, 0.9, q, 256);
      const auto r = rate_quadratic_Bq(rr, 0.9, q, 256);
      double expected = 0.0;
      if (m == 0) {
        expected = std::pow(rr, 4);
      } else if (m * m > 256) {
        expected = std::max(0.81 * rr * rr, std::pow(0.9, 4) * 256.0);
      } else {
        const double md = static_cast<double>(m);
        const double lg = std::log1p(256.0 / (md * md));
        expected = std::max(0.81 * rr * rr, std::pow(0.9, 4) * md * md * lg * lg);
      }
      CHECK_THAT(r.value, WithinRel(expected, 1e-14));
    }
  }
  CHECK_THROWS_AS(rate_quadratic_Bq(1.0, 1.0, 2.0, 10), InvalidArgument);
}

TEST_CASE("norm rate") {
  CHECK_THAT(rate_l2norm(2, 100, 1.0).value, WithinAbs(6.516, 1e-3));
  CHECK(rate_l2norm(10, 100, 1.0).value == 10.0);
  CHECK(rate_l2norm(10, 100, 1.0).zone == Zone::Dense);
  CHECK(rate_l2norm(64, 100, 2.0).value == 40.0);
  for (long long root : {3LL, 10LL, 31LL, 100LL}) {
    const long long d = root * root;
    const double below = rate_l2norm(root - 1 > 0 ? root - 1 : 1, d, 1.0).value;
    const double at = rate_l2norm(root, d, 1.0).value;
    const double sparse_formula_at_root = static_cast<double>(root) * std::log(2.0);
    CHECK(at / sparse_formula_at_root <= 2.0 / std::log(2.0));
    CHECK(std::max(at, below) / std::min(at, below) <= 2.0 / std::log(2.0));
  }
  CHECK(rate_l2norm_Bq(0.5, 1.0, 1.0, 100).value == 0.25);
  CHECK(rate_l2norm_Bq(10.0, 1.0, 1.0, 100).value == 10.0);
  for (double rr : {1.5, 3.0, 6.0}) {
    const long long m = effective_sparsity(rr, 1.0, 0.5, 400);
    const auto r = rate_l2norm_Bq(rr, 1.0, 0.5, 400);
    if (m >= 1 && m * m <= 400) {
      const double md = static_cast<double>(m);
      CHECK_THAT(r.value, WithinRel(md * std::log1p(400.0 / (md * md)), 1e-14));
    }
  }
}

TEST_CASE("testing rates") {
  const double sigma = 1.2;
  CHECK_THAT(testing_rate(SparsityClass::theta_qu(0.0, 3.0, 1.0), sigma, 100).value,
             WithinRel(std::sqrt(rate_l2norm(3, 100, sigma).value), 1e-15));
  CHECK_THAT(testing_rate(SparsityClass::theta_qu(0.5, 3.0, 1.0), sigma, 100).value,
             WithinRel(std::sqrt(rate_l2norm_Bq(3.0, sigma, 0.5, 100).value), 1e-15));
  CHECK_THAT(testing_rate(SparsityClass::theta_s_star(20, 1.0), sigma, 100).value,
             WithinRel(sigma * std::pow(100.0, 0.25) / std::sqrt(20.0), 1e-15));
  CHECK_THAT(testing_rate(SparsityClass::theta_s(4, 1.0), sigma, 100).value,
             WithinRel(sigma * std::sqrt(std::log1p(100.0 / 16.0)), 1e-15));
  CHECK_NOTHROW(testing_rate(SparsityClass::theta_s(10, 1.0), sigma, 100));
  CHECK_THROWS_AS(testing_rate(SparsityClass::theta_s(11, 1.0), sigma, 100), UnsupportedRegime);
  CHECK_THROWS_AS(testing_rate(SparsityClass::b0(2), sigma, 100), InvalidArgument);

  SECTION("l2 scale is sqrt(psi^sqrtQ)") {
    for (long long s : {1LL, 5LL, 9LL, 10LL, 30LL}) {
      const double expected = std::sqrt(rate_l2norm(s, 100, sigma).value);
      CHECK_THAT(testing_l2_scale(SparsityClass::theta_s_star(s, 1.0), sigma, 100), WithinRel(expected, 1e-14));
      CHECK_THAT(testing_l2_scale(SparsityClass::theta_qu(0.0, static_cast<double>(s), 1.0), sigma, 100),
                 WithinRel(expected, 1e-14));
    }
  }

  SECTION("the log log d regime") {
    // s ~ sqrt(d) / log d; the ratio is about 1.42 to 1.48 over this range.
    for (int k = 10; k <= 20; ++k) {
      const long long d = 1LL << k;
      const auto s = static_cast<long long>(std::sqrt(static_cast<double>(d)) / std::log(static_cast<double>(d)));
      const double lam = testing_rate(SparsityClass::theta_s_star(s, 1.0), 1.0, d).value;
      const double ratio = lam / std::sqrt(std::log(std::log(static_cast<double>(d))));
      INFO("d = 2^" << k << " s = " << s);
      CHECK(ratio >= 1.0);
      CHECK(ratio <= 2.0);
    }
  }
}

TEST_CASE("zones are exhaustive and exclusive") {
  for (long long d : {1LL, 2LL, 16LL, 17LL, 100LL}) {
    for (long long s = 1; s <= d; ++s) {
      const bool sparse = s * s < d;
      CHECK((rate_linear_B0(s, d, 1.0).zone == Zone::Sparse) == sparse);
      CHECK((rate_l2norm(s, d, 1.0).zone == Zone::Sparse) == sparse);
      for (double kappa : {0.1, 1.0, 3.0, 10.0, 100.0}) {
        const auto r = rate_quadratic(s, d, 1.0, kappa);
        const double k4 = std::pow(kappa, 4);
        const double bar = psi_bar(s, d, 1.0);
        const double ps = std::max(kappa * kappa, bar);
        Zone expected;
        if (k4 < ps) {
          expected = Zone::ZeroEstimator;
        } else if (kappa * kappa > bar) {
          expected = Zone::VarianceDominated;
        } else {
          expected = sparse ? Zone::Sparse : Zone::Dense;
        }
        CHECK(r.zone == expected);
      }
    }
  }
}

TEST_CASE("rates are scale covariant") {
  for (double t : {0.1, 10.0}) {
    for (long long s : {1LL, 3LL, 10LL, 40LL}) {
      const double sigma = 0.7;
      const double kappa = 2.3;
      CHECK_THAT(rate_linear_B0(s, 100, t * sigma).value, WithinRel(t * t * rate_linear_B0(s, 100, sigma).value, 1e-12));
      CHECK_THAT(rate_quadratic(s, 100, t * sigma, t * kappa).value,
                 WithinRel(std::pow(t, 4) * rate_quadratic(s, 100, sigma, kappa).value, 1e-12));
      CHECK_THAT(rate_l2norm(s, 100, t * sigma).value, WithinRel(t * t * rate_l2norm(s, 100, sigma).value, 1e-12));
    }
    for (double rr : {0.9, 2.7, 11.0}) {
      CHECK_THAT(rate_linear_Bq(t * rr, t * 0.7, 0.6, 200).value,
                 WithinRel(t * t * rate_linear_Bq(rr, 0.7, 0.6, 200).value, 1e-12));
      CHECK_THAT(rate_quadratic_Bq(t * rr, t * 0.7, 1.3, 200).value,
                 WithinRel(std::pow(t, 4) * rate_quadratic_Bq(rr, 0.7, 1.3, 200).value, 1e-12));
      CHECK_THAT(rate_l2norm_Bq(t * rr, t * 0.7, 1.3, 200).value,
                 WithinRel(t * t * rate_l2norm_Bq(rr, 0.7, 1.3, 200).value, 1e-12));
    }
  }
}
