#include "sparsefunc/testing.hpp"

#include <algorithm>
#include <cmath>

#include "sparsefunc/errors.hpp"
#include "sparsefunc/estimators.hpp"
#include "sparsefunc/parallel.hpp"
#include "sparsefunc/rates.hpp"

namespace sparsefunc::testing {

void TestSpec::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) throw InvalidArgument("A must be positive and finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  switch (alternative.tag) {
    case ClassTag::ThetaQU:
    case ClassTag::ThetaS:
    case ClassTag::ThetaSStar:
      break;
    default:
      throw InvalidArgument("the alternative must be Theta_qu, Theta_s or Theta_s_star");
  }
  alternative.with_delta(1.0).validate(d);
}

double TestSpec::lambda() const {
  return rates::testing_rate(alternative, sigma, static_cast<long long>(d)).value;
}

double TestSpec::separation() const { return A * lambda(); }

SparsityClass TestSpec::separated_alternative() const {
  return alternative.with_delta(separation());
}

double TestSpec::cut() const {
  return 0.5 * A * rates::testing_l2_scale(alternative, sigma, static_cast<long long>(d));
}

double norm_statistic(const ObservationBatch& obs, const TestSpec& spec) {
  const auto& alt = spec.alternative;
  if (alt.tag == ClassTag::ThetaQU && alt.q != 0.0) {
    return estimators::l2norm_Bq(obs, alt.r, alt.q);
  }
  return estimators::l2norm_B0(obs, alt.s);
}

int test_statistic(const ObservationBatch& obs, const TestSpec& spec) {
  spec.validate();
  if (obs.dim() != spec.d) throw DimensionMismatch("observation dimension differs from the test spec");
  return norm_statistic(obs, spec) > spec.cut() ? 1 : 0;
}

std::vector<LabeledVector> default_witnesses(const TestSpec& spec) {
  spec.validate();
  return worst_case_configs(spec.separated_alternative(), spec.sigma, spec.d);
}

TestRiskReport evaluate_test_risk(const TestSpec& spec, const std::vector<LabeledVector>& witnesses,
                                  std::size_t n_reps, std::uint64_t seed, unsigned workers) {
  spec.validate();
  if (n_reps < 1) throw InvalidArgument("n_reps must be >= 1");
  if (witnesses.empty()) throw InvalidArgument("at least one witness is required");
  const SparsityClass separated = spec.separated_alternative();
  for (const auto& w : witnesses) {
    if (w.theta.dim() != spec.d) throw DimensionMismatch("witness '" + w.label + "' has wrong d");
    if (!membership(w.theta, separated)) {
      throw WitnessOutsideClass("witness '" + w.label + "' is not in " + separated.describe());
    }
  }

  const double cut = spec.cut();
  const std::size_t streams = witnesses.size() + 1;
  // decisions[k * n_reps + i]: stream k (0 = null), replication i.
  std::vector<unsigned char> decisions(streams * n_reps, 0);
  const ParameterVector zero = ParameterVector::zeros(spec.d);
  parallel_for(streams * n_reps, workers, [&](std::size_t idx) {
    const std::size_t k = idx / n_reps;
    const std::size_t i = idx % n_reps;
    const ParameterVector& theta = k == 0 ? zero : witnesses[k - 1].theta;
    RandomStream stream(derive_seed(seed, k, i));
    const ObservationBatch obs = generate_observation(theta, spec.sigma, stream);
    decisions[idx] = norm_statistic(obs, spec) > cut ? 1 : 0;
  });

  const auto n = static_cast<double>(n_reps);
  const auto rate_of = [&](std::size_t k, bool reject_counts) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_reps; ++i) {
      const bool reject = decisions[k * n_reps + i] != 0;
      if (reject == reject_counts) ++hits;
    }
    return static_cast<double>(hits) / n;
  };

  TestRiskReport report;
  report.replications = n_reps;
  report.seed = seed;
  report.type_one = rate_of(0, true);
  for (std::size_t k = 1; k < streams; ++k) {
    report.witness_labels.push_back(witnesses[k - 1].label);
    report.type_two.push_back(rate_of(k, false));
  }
  const auto it = std::max_element(report.type_two.begin(), report.type_two.end());
  report.max_witness = static_cast<std::size_t>(it - report.type_two.begin());
  report.max_type_two = *it;
  report.total = report.type_one + report.max_type_two;
  const double p1 = report.type_one;
  const double p2 = report.max_type_two;
  report.stderr_total = std::sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / n);
  return report;
}

double chebyshev_risk_bound(double A, double c_star) {
  if (!(A > 0.0) || !(c_star > 0.0)) throw InvalidArgument("A and c_star must be positive");
  return std::min(1.0, c_star / (A * A));
}

}  // namespace sparsefunc::testing
