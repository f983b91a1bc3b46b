#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparsefunc/errors.hpp"
#include "sparsefunc/estimators.hpp"
#include "sparsefunc/rates.hpp"
#include "sparsefunc/testing.hpp"

using namespace sparsefunc;
using namespace sparsefunc::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TestSpec sparse_spec(double A, long long s = 8, std::size_t d = 256) {
  TestSpec spec;
  spec.alternative = SparsityClass::theta_qu(0.0, static_cast<double>(s), 1.0);
  spec.A = A;
  spec.sigma = 1.0;
  spec.d = d;
  return spec;
}

}  // namespace

TEST_CASE("test statistic examples") {
  const auto spec = sparse_spec(1.0);
  CHECK(test_statistic(ObservationBatch(std::vector<double>(256, 0.0), 1.0), spec) == 0);
  CHECK(test_statistic(ObservationBatch(std::vector<double>(256, 100.0), 1.0), spec) == 1);
  CHECK_THROWS_AS(test_statistic(ObservationBatch(std::vector<double>(10, 0.0), 1.0), spec), DimensionMismatch);
}

TEST_CASE("the statistic must be strictly above the cut") {
  // Dense branch with d = 16, s = 4: N_hat = sqrt(sum y^2 - 16).
  std::vector<double> y(16, 0.0);
  y[0] = 5.0;
  y[1] = 3.0;
  const ObservationBatch obs(y, 1.0);
  TestSpec spec = sparse_spec(1.0, 4, 16);
  const double n = norm_statistic(obs, spec);
  CHECK(n == std::sqrt(34.0 - 16.0));
  const double scale = rates::testing_l2_scale(spec.alternative, 1.0, 16);
  spec.A = 2.0 * n / scale;
  for (int step = 0; step < 64 && spec.cut() != n; ++step) {
    spec.A = spec.cut() < n ? std::nextafter(spec.A, 1e9) : std::nextafter(spec.A, 0.0);
  }
  REQUIRE(spec.cut() == n);
  CHECK(test_statistic(obs, spec) == 0);
  spec.A = std::nextafter(spec.A, 0.0);
  while (spec.cut() == n) spec.A = std::nextafter(spec.A, 0.0);
  CHECK(test_statistic(obs, spec) == 1);
}

TEST_CASE("cut and separation") {
  const auto spec = sparse_spec(3.0);
  CHECK_THAT(spec.lambda(), WithinRel(std::sqrt(8.0 * std::log1p(256.0 / 64.0)), 1e-14));
  CHECK_THAT(spec.separation(), WithinRel(3.0 * spec.lambda(), 1e-15));
  CHECK_THAT(spec.cut(), WithinRel(1.5 * spec.lambda(), 1e-15));
  CHECK(spec.separated_alternative().delta == spec.separation());

  TestSpec star;
  star.alternative = SparsityClass::theta_s_star(4, 1.0);
  star.A = 2.0;
  star.d = 256;
  star.sigma = 0.5;
  CHECK_THAT(star.cut(), WithinRel(0.5 * 2.0 * star.lambda() * 2.0, 1e-14));

  TestSpec bad = sparse_spec(0.0);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = sparse_spec(1.0);
  bad.alternative = SparsityClass::b0(3);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  TestSpec theta_s;
  theta_s.alternative = SparsityClass::theta_s(20, 1.0);
  theta_s.d = 256;
  CHECK_THROWS_AS(theta_s.cut(), UnsupportedRegime);
}

TEST_CASE("the test is scale invariant") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto theta = equal_spikes(256, 8, 1.2);
    const auto obs = generate_observation(theta, 1.0, seed);
    for (double t : {0.01, 7.0}) {
      std::vector<double> ty(obs.y().begin(), obs.y().end());
      for (auto& v : ty) v *= t;
      TestSpec a = sparse_spec(1.0);
      TestSpec b = a;
      b.sigma = t;
      CHECK(test_statistic(obs, a) == test_statistic(ObservationBatch(ty, t), b));
    }
  }
}

TEST_CASE("risk evaluation: strong and weak separation") {
  SECTION("A = 1000") {
    const auto spec = sparse_spec(1e3);
    const auto report = evaluate_test_risk(spec, default_witnesses(spec), 200, 11);
    CHECK(report.total <= 0.05);
    CHECK(report.total == report.type_one + report.max_type_two);
  }
  SECTION("A = 0.001") {
    const auto spec = sparse_spec(1e-3);
    const auto witnesses = default_witnesses(spec);
    const auto report = evaluate_test_risk(spec, witnesses, 200, 11);
    CHECK(report.total >= 0.9);
  }
  SECTION("coordinate-wise alternatives") {
    TestSpec star;
    star.alternative = SparsityClass::theta_s_star(4, 1.0);
    star.A = 1e3;
    star.d = 256;
    const auto report = evaluate_test_risk(star, default_witnesses(star), 200, 3);
    CHECK(report.total <= 0.05);
    TestSpec ts = star;
    ts.alternative = SparsityClass::theta_s(4, 1.0);
    CHECK(evaluate_test_risk(ts, default_witnesses(ts), 200, 3).total <= 0.05);
  }
  SECTION("l_q alternative") {
    TestSpec lq;
    lq.alternative = SparsityClass::theta_qu(1.0, 1000.0, 1.0);
    lq.A = 50.0;
    lq.d = 256;
    const auto report = evaluate_test_risk(lq, default_witnesses(lq), 200, 3);
    CHECK(report.total <= 0.05);
    lq.alternative = SparsityClass::theta_qu(1.0, 6.0, 1.0);
    CHECK_THROWS_AS(default_witnesses(lq), WitnessOutsideClass);
  }
}

TEST_CASE("risk report bookkeeping") {
  const auto spec = sparse_spec(1.0);
  const auto witnesses = default_witnesses(spec);
  const auto a = evaluate_test_risk(spec, witnesses, 300, 5, 1);
  const auto b = evaluate_test_risk(spec, witnesses, 300, 5, 3);
  CHECK(a.type_one == b.type_one);
  CHECK(a.type_two == b.type_two);
  CHECK(a.witness_labels.size() == witnesses.size());
  CHECK(a.replications == 300);
  CHECK(a.seed == 5);
  CHECK(a.max_type_two == a.type_two[a.max_witness]);
  for (double p : a.type_two) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p <= a.max_type_two);
  }
  const double p1 = a.type_one;
  const double p2 = a.max_type_two;
  CHECK_THAT(a.stderr_total, WithinRel(std::sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / 300.0), 1e-14));

  CHECK_THROWS_AS(evaluate_test_risk(spec, witnesses, 0, 5), InvalidArgument);
  std::vector<LabeledVector> outside{{"tiny", equal_spikes(256, 8, 1e-3)}};
  CHECK_THROWS_AS(evaluate_test_risk(spec, outside, 10, 5), WitnessOutsideClass);
}

TEST_CASE("null behaviour does not depend on the seed beyond Monte Carlo error") {
  const auto spec = sparse_spec(1.0);
  const auto witnesses = default_witnesses(spec);
  const auto a = evaluate_test_risk(spec, witnesses, 2000, 101);
  const auto b = evaluate_test_risk(spec, witnesses, 2000, 202);
  const double joint = std::sqrt(a.stderr_total * a.stderr_total + b.stderr_total * b.stderr_total);
  CHECK(std::abs(a.total - b.total) <= 4.0 * joint + 1e-12);
}

TEST_CASE("total risk decreases along the A grid") {
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double prev = 2.0;
  double prev_se = 0.0;
  for (double A : grid) {
    const auto spec = sparse_spec(A);
    const auto r = evaluate_test_risk(spec, default_witnesses(spec), 2000, 42);
    INFO("A = " << A << " total = " << r.total);
    CHECK(r.total <= prev + 3.0 * std::max(prev_se, r.stderr_total) + 1e-12);
    prev = r.total;
    prev_se = r.stderr_total;
  }
}

TEST_CASE("Chebyshev envelope") {
  CHECK(chebyshev_risk_bound(2.0, 4.0) == 1.0);
  CHECK_THAT(chebyshev_risk_bound(10.0, 4.0), WithinRel(0.04, 1e-15));
  CHECK(chebyshev_risk_bound(1e200, 4.0) == 0.0);
  CHECK_THROWS_AS(chebyshev_risk_bound(0.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(chebyshev_risk_bound(1.0, -1.0), InvalidArgument);
}
