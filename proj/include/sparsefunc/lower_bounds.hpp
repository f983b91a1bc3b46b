#pragma once

// Chi-square divergence between the sparse mixtures P_mu and pure noise P_0,
// the two-point Kullback-Leibler divergence, and the numeric content of the
// reduction lemmas turning those divergences into minimax lower bounds.

#include <optional>
#include <vector>

#include "sparsefunc/model.hpp"
#include "sparsefunc/rates.hpp"

namespace sparsefunc::lower_bounds {

struct DivergenceResult {
  std::optional<double> exact;
  double bound = 0.0;
  double rho = 0.0;
  long long s = 0;
  long long d = 0;
};

/// P(J = j) for j = 0..s, where J = |I cap I'| for independent uniform
/// s-subsets I, I' of {1..d} (hypergeometric). Entries below max(0, 2s - d)
/// are zero.
std::vector<double> overlap_pmf(long long s, long long d);

/// E exp(rho^2 J) - 1: the chi-square divergence of the uniform-positive
/// prior mixture from P_0. Throws NumericOverflow past the double range.
double chi2_exact_uniform_prior(long long s, long long d, double rho);

/// (1 - s/d + (s/d) e^{rho^2})^s - 1.
double chi2_bound_uniform_prior(long long s, long long d, double rho);

/// (1 - s/d + (s/d) cosh(rho^2))^s - 1, the bound for the signed prior.
double chi2_bound_signed_prior(long long s, long long d, double rho);

/// Bound for the prior's kind, plus the exact value for the positive prior
/// when `with_exact`.
DivergenceResult chi2(PriorKind kind, long long s, long long d, double rho, bool with_exact);

/// ||a - b||^2 / (2 sigma^2).
double two_point_kl(const ParameterVector& a, const ParameterVector& b, double sigma);

struct Certificate {
  /// Half the constant value the functional takes on the prior's support.
  double v = 0.0;
  /// Chi-square bound for the prior.
  double beta = 0.0;
  /// Lower bound on inf_T max(P_0(|T - T(0)| >= v), P_mu(|T - T(mu)| >= v)): e^{-beta}/4.
  double prob_bound = 0.0;
  /// log(prob_bound); stays finite after prob_bound underflows for large beta.
  double log_prob_bound = 0.0;
  /// 1 - sqrt(beta); may be negative, in which case it is vacuous.
  double testing_bound = 0.0;
};

/// Throws NonConstantFunctional for the signed prior with the linear
/// functional (L is not constant on that prior's support).
Certificate minimax_lower_certificate(const SparsePrior& prior, rates::Functional functional);

}  // namespace sparsefunc::lower_bounds
