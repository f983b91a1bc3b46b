#pragma once

// Thresholding estimators of L(theta), Q(theta) and ||theta||_2 with known
// noise level, and the plug-in versions built on the noise over-estimate
// sigma_hat. Every threshold comparison is strict: |y_j| > level.

#include <optional>
#include <span>
#include <string>

#include "sparsefunc/model.hpp"
#include "sparsefunc/rates.hpp"

namespace sparsefunc::estimators {

/// Value together with the rule that produced it. `threshold` is the absolute
/// cut applied to |y_j| when the branch thresholds.
struct Evaluation {
  double value = 0.0;
  std::string branch;
  std::optional<double> threshold;
  std::optional<double> sigma_hat;
};

// Known noise level.
Evaluation linear_B0_detail(const ObservationBatch& obs, long long s);
Evaluation linear_Bq_detail(const ObservationBatch& obs, double r, double q);
Evaluation quadratic_B0_detail(const ObservationBatch& obs, long long s, double kappa);
/// The quadratic rule without the kappa gate (the statistic behind the norm estimator).
Evaluation quadratic_ungated_detail(const ObservationBatch& obs, long long s);
Evaluation quadratic_Bq_detail(const ObservationBatch& obs, double r, double q);

double linear_B0(const ObservationBatch& obs, long long s);
double linear_Bq(const ObservationBatch& obs, double r, double q);
double quadratic_B0(const ObservationBatch& obs, long long s, double kappa);
double quadratic_positive_part(const ObservationBatch& obs, long long s, double kappa);
double quadratic_ungated(const ObservationBatch& obs, long long s);
double quadratic_Bq(const ObservationBatch& obs, double r, double q);
double l2norm_B0(const ObservationBatch& obs, long long s);
double l2norm_Bq(const ObservationBatch& obs, double r, double q);

// Unknown noise level. Only y is used.
/// 3 * sqrt((1/d) * sum of the floor(d - sqrt(d)) smallest y_j^2). Needs d >= 3.
double sigma_hat(std::span<const double> y);
Evaluation linear_unknown_sigma_detail(std::span<const double> y, long long s);
Evaluation linear_adaptive_detail(std::span<const double> y);
Evaluation quadratic_unknown_sigma_detail(std::span<const double> y);

double linear_unknown_sigma(std::span<const double> y, long long s);
double linear_adaptive(std::span<const double> y);
double quadratic_unknown_sigma(std::span<const double> y);

enum class NoiseMode { Known, Unknown };
/// ExactRate uses the class parameters; AdaptiveLogd is the sqrt(2 log d)
/// plug-in rule that needs neither s nor sigma.
enum class Variant { ExactRate, AdaptiveLogd };

std::string to_string(NoiseMode mode);
std::string to_string(Variant variant);

/// Which estimator to run. Supported combinations:
///   known,   L     : B0 / B2CapB0 (s), Bq with q <= 1
///   known,   Q     : B2CapB0 (s, kappa), Bq with q < 2; positive_part optional
///   known,   sqrtQ : B0 / B2CapB0 (s), Bq with q < 2
///   unknown, L     : ExactRate on B0 / B2CapB0 with s^2 <= d; AdaptiveLogd
///   unknown, Q     : AdaptiveLogd only
struct EstimatorSpec {
  rates::Functional functional = rates::Functional::L;
  SparsityClass cls = SparsityClass::b0(1);
  NoiseMode noise = NoiseMode::Known;
  Variant variant = Variant::ExactRate;
  bool positive_part = false;

  /// Throws InvalidArgument / UnsupportedRegime for combinations outside the table.
  void validate(std::size_t d) const;
};

/// `sigma` is required for known noise and ignored otherwise.
Evaluation estimate(const EstimatorSpec& spec, std::span<const double> y,
                    std::optional<double> sigma);
/// Same, taking sigma from the batch when the noise is known.
Evaluation estimate(const EstimatorSpec& spec, const ObservationBatch& obs);

/// L(theta), Q(theta) or ||theta||_2.
double functional_value(rates::Functional functional, const ParameterVector& theta);

}  // namespace sparsefunc::estimators
