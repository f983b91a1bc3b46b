#pragma once

// Data model for the Gaussian sequence model y_j = theta_j + sigma xi_j:
// parameter vectors, the sparsity classes they live in, observation
// generation, and the sparse priors used by the lower bounds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsefunc/rng.hpp"

namespace sparsefunc {

/// The unknown mean theta in R^d together with its derived functionals.
class ParameterVector {
 public:
  explicit ParameterVector(std::vector<double> theta);
  static ParameterVector zeros(std::size_t d);

  std::size_t dim() const noexcept { return theta_.size(); }
  std::span<const double> values() const noexcept { return theta_; }
  double operator[](std::size_t j) const { return theta_[j]; }

  std::vector<std::size_t> support() const;
  std::size_t sparsity() const noexcept;
  /// (sum |theta_j|^q)^(1/q) for q > 0.
  double lq_norm(double q) const;
  /// L(theta) = sum theta_j.
  double linear() const noexcept;
  /// Q(theta) = sum theta_j^2.
  double quadratic() const noexcept;
  double l2_norm() const noexcept;
  /// min |theta_j| over the support; +inf for the zero vector.
  double min_nonzero_magnitude() const noexcept;

 private:
  std::vector<double> theta_;
};

/// One realization y of the model together with the noise level.
class ObservationBatch {
 public:
  ObservationBatch(std::vector<double> y, double sigma);

  std::size_t dim() const noexcept { return y_.size(); }
  std::span<const double> y() const noexcept { return y_; }
  double sigma() const noexcept { return sigma_; }

 private:
  std::vector<double> y_;
  double sigma_;
};

enum class ClassTag { B0, Bq, B2CapB0, ThetaQU, ThetaS, ThetaSStar };

std::string to_string(ClassTag tag);

/// Tagged description of a parameter class. Only the fields relevant to the
/// tag are meaningful:
///   B0         s
///   Bq         q in (0, 2], r
///   B2CapB0    kappa, s
///   ThetaQU    q = 0 with u = s, or q in (0, 2) with u = r; delta
///   ThetaS     s, delta   (theta_j in {0, delta}, exactly s nonzeros)
///   ThetaSStar s, delta   (exactly s nonzeros, each |theta_j| >= delta)
struct SparsityClass {
  ClassTag tag = ClassTag::B0;
  long long s = 0;
  double q = 0.0;
  double r = 0.0;
  double kappa = 0.0;
  double delta = 0.0;

  static SparsityClass b0(long long s);
  static SparsityClass bq(double q, double r);
  static SparsityClass b2_cap_b0(double kappa, long long s);
  /// Theta_{q,u}(delta). For q == 0, u must be an integer sparsity level.
  static SparsityClass theta_qu(double q, double u, double delta);
  static SparsityClass theta_s(long long s, double delta);
  static SparsityClass theta_s_star(long long s, double delta);

  /// Throws InvalidArgument unless the parameters are admissible in dimension d.
  void validate(std::size_t d) const;
  /// Same class with a different separation delta (testing alternatives only).
  SparsityClass with_delta(double new_delta) const;
  bool sparsity_indexed() const noexcept;
  std::string describe() const;
};

/// Relative slack applied to norm-ball and separation comparisons so that
/// vectors constructed on a ball boundary are not rejected by rounding.
inline constexpr double kMembershipRelTol = 1e-12;

bool membership(const ParameterVector& theta, const SparsityClass& cls);

ObservationBatch generate_observation(const ParameterVector& theta, double sigma,
                                      RandomStream& stream);
ObservationBatch generate_observation(const ParameterVector& theta, double sigma,
                                      std::uint64_t seed);

enum class PriorKind { UniformPositive, UniformSigned };

/// Uniform law on s-sparse vectors whose nonzero entries equal sigma*rho
/// (UniformPositive) or are independent uniform signs times sigma*rho
/// (UniformSigned).
struct SparsePrior {
  PriorKind kind = PriorKind::UniformPositive;
  long long s = 1;
  double rho = 0.0;
  double sigma = 1.0;
  std::size_t d = 1;

  void validate() const;
  double amplitude() const noexcept { return sigma * rho; }
};

ParameterVector sample_prior(const SparsePrior& prior, RandomStream& stream);
ParameterVector sample_prior(const SparsePrior& prior, std::uint64_t seed);

struct LabeledVector {
  std::string label;
  ParameterVector theta;
};

/// Deterministic witnesses standing in for the supremum over a class: the
/// lower-bound prior spikes, spikes sitting on the estimator threshold,
/// two-point and ball-boundary configurations. Every entry is a member of
/// `cls` in dimension d. See docs/witnesses.md for the full list.
std::vector<LabeledVector> worst_case_configs(const SparsityClass& cls, double sigma,
                                              std::size_t d);

/// A vector with `count` leading entries equal to `value` and zeros elsewhere.
ParameterVector equal_spikes(std::size_t d, std::size_t count, double value);

}  // namespace sparsefunc
