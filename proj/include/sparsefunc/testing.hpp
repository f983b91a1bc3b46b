#pragma once

// Plug-in tests of H0: theta = 0 against separated sparse alternatives and
// their Monte Carlo risk (type-one error plus the largest type-two error over
// a witness list).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsefunc/model.hpp"

namespace sparsefunc::testing {

/// `alternative` fixes the shape of the alternative; its delta is ignored and
/// replaced by the separation A * lambda.
struct TestSpec {
  SparsityClass alternative;
  double A = 1.0;
  double sigma = 1.0;
  std::size_t d = 1;

  void validate() const;
  /// lambda from the rate calculus, in the units of the alternative's delta.
  double lambda() const;
  /// A * lambda.
  double separation() const;
  /// The alternative with delta = A * lambda.
  SparsityClass separated_alternative() const;
  /// (A/2) * sqrt(psi^sqrtQ): the level the norm estimate must exceed.
  double cut() const;
};

/// N_hat for sparsity-indexed alternatives, N_hat_q for Theta_qu with q > 0.
double norm_statistic(const ObservationBatch& obs, const TestSpec& spec);

/// 1 iff the norm statistic is strictly above spec.cut().
int test_statistic(const ObservationBatch& obs, const TestSpec& spec);

struct TestRiskReport {
  double type_one = 0.0;
  std::vector<std::string> witness_labels;
  std::vector<double> type_two;
  double max_type_two = 0.0;
  std::size_t max_witness = 0;
  double total = 0.0;
  /// Binomial standard error of type_one + type_two[max_witness]; the null
  /// and each witness use independent streams.
  double stderr_total = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

/// Witnesses from worst_case_configs for the separated alternative.
std::vector<LabeledVector> default_witnesses(const TestSpec& spec);

/// Replication i of the null uses derive_seed(seed, 0, i); witness k uses
/// derive_seed(seed, k + 1, i). The seeds do not depend on A, so curves over
/// an A-grid use common random numbers. Throws WitnessOutsideClass when a
/// witness is not in the separated alternative.
TestRiskReport evaluate_test_risk(const TestSpec& spec, const std::vector<LabeledVector>& witnesses,
                                  std::size_t n_reps, std::uint64_t seed, unsigned workers = 0);

/// min(1, c_star / A^2).
double chebyshev_risk_bound(double A, double c_star);

}  // namespace sparsefunc::testing
