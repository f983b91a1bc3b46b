#pragma once

// Monte Carlo risk evaluation and experiment orchestration.
//
// Replication i of stream k under master seed m draws its noise from
// RandomStream(derive_seed(m, k, i)); errors are stored per replication and
// reduced in index order, so reports do not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sparsefunc/estimators.hpp"
#include "sparsefunc/model.hpp"
#include "sparsefunc/rates.hpp"

namespace sparsefunc::harness {

/// Version written into the schema_version column of every CSV table.
inline constexpr int kCsvSchemaVersion = 1;

struct ExperimentConfig {
  rates::Functional functional = rates::Functional::L;
  /// B0, Bq or B2CapB0.
  SparsityClass cls = SparsityClass::b0(1);
  std::size_t d = 1;
  double sigma = 1.0;
  estimators::NoiseMode noise = estimators::NoiseMode::Known;
  estimators::Variant variant = estimators::Variant::ExactRate;
  bool positive_part = false;
  /// Labels from worst_case_configs to keep; empty means all of them.
  std::vector<std::string> witnesses;
  std::size_t n_reps = 1000;
  std::uint64_t seed = 1;
  std::string output;

  void validate() const;
  estimators::EstimatorSpec estimator_spec() const;
  std::string describe() const;
};

/// Parses one config object. Unknown keys are rejected.
ExperimentConfig parse_config_json(const std::string& text);
/// Accepts a single config object, an array of them, or {"configs": [...]}.
std::vector<ExperimentConfig> parse_grid_json(const std::string& text);
std::string to_json(const ExperimentConfig& config);

/// The rate a config's risk is compared with:
///   known noise        psi^L, psi^Q or psi^sqrtQ for the class
///   unknown, L exact   psi^L(s, d)
///   unknown, L log d   sigma^2 s^2 log d
///   unknown, Q         max(sigma^2 kappa^2, sigma^4 s^2 log^2 d)
rates::RateValue reference_rate(const ExperimentConfig& config);
std::string reference_rate_name(const ExperimentConfig& config);

struct RiskReport {
  double mean_sq_error = 0.0;
  /// Sample standard deviation of the squared errors over sqrt(n_reps).
  double std_error = 0.0;
  double rate_value = 0.0;
  double ratio = 0.0;
  rates::Zone zone = rates::Zone::Sparse;
  std::string rate_name;
  std::size_t n_reps = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string theta_label;
};

/// Throws WitnessOutsideClass when theta is not in the config's class.
RiskReport monte_carlo_risk(const ExperimentConfig& config, const ParameterVector& theta,
                            const std::string& theta_label = "custom", std::uint64_t stream = 0,
                            unsigned workers = 0);

/// Witnesses of the config's class, filtered by config.witnesses.
std::vector<LabeledVector> select_witnesses(const ExperimentConfig& config);

struct SweepRow {
  std::size_t config_index = 0;
  ExperimentConfig config;
  RiskReport report;
  /// Largest ratio over the witnesses of this config.
  double config_max_ratio = 0.0;
};

/// Config c runs on stream c, so a one-config grid reproduces monte_carlo_risk
/// with stream 0.
std::vector<SweepRow> risk_sweep(const std::vector<ExperimentConfig>& grid, unsigned workers = 0);

struct KnownUnknownComparison {
  RiskReport known;     ///< L_hat, ratio to psi^L
  RiskReport plug_in;   ///< L_tilde, ratio to psi^L
  RiskReport adaptive;  ///< L_tilde', ratio to sigma^2 s^2 log d
};

/// Same seeds through the three linear estimators. Needs functional L on a
/// sparsity class with s^2 <= d and d >= 3 (UnsupportedRegime otherwise).
KnownUnknownComparison compare_known_unknown_sigma(const ExperimentConfig& config,
                                                   const ParameterVector& theta,
                                                   unsigned workers = 0);

std::vector<std::string> sweep_csv_header();
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string to_json(const RiskReport& report);
std::string to_json(const std::vector<SweepRow>& rows);

}  // namespace sparsefunc::harness
