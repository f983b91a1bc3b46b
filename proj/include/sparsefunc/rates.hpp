#pragma once

// Minimax rate calculus for the linear functional, the quadratic functional
// and the l2 norm on B_0(s), B_2(kappa) cap B_0(s) and l_q balls, plus the
// separation rates for testing against sparse alternatives.
//
// All comparisons against sqrt(d) are done on integers (s*s vs d). Logs are
// natural. Values are in squared-risk units except testing_rate, which
// returns a separation distance.

#include <optional>
#include <string>

#include "sparsefunc/model.hpp"

namespace sparsefunc::rates {

enum class Zone { Dense, Sparse, Degenerate, VarianceDominated, ZeroEstimator };
enum class Functional { L, Q, SqrtQ };

std::string to_string(Zone zone);
std::string to_string(Functional functional);

struct RateValue {
  double value = 0.0;
  Zone zone = Zone::Sparse;
  Functional functional = Functional::L;
  /// Equivalent closed form where one exists (e.g. sigma^2 d in the dense
  /// zone of the l_q linear rate).
  std::optional<double> equivalent;
  /// Effective sparsity, for the l_q-ball rates.
  std::optional<long long> m;
};

/// s^2 < d, exactly.
bool below_sqrt(long long s, long long d) noexcept;
/// s^2 <= d, exactly.
bool at_most_sqrt(long long s, long long d) noexcept;
long long floor_sqrt(long long d) noexcept;
long long ceil_sqrt(long long d) noexcept;

/// Largest integer s in [1, d] with sigma^2 log(1 + d/s^2) <= r^2 s^(-2/q),
/// or 0 when no such s exists. Exhaustive scan; the cap at d is deliberate.
long long effective_sparsity(double r, double sigma, double q, long long d);

RateValue rate_linear_B0(long long s, long long d, double sigma);
/// min(sigma^2 s^2 log(1 + d/s^2), sigma^2 d).
double rate_linear_B0_min_form(long long s, long long d, double sigma);
RateValue rate_linear_Bq(double r, double sigma, double q, long long d);

/// psi_bar: sigma^4 s^2 log^2(1 + d/s^2) if s < sqrt(d), sigma^4 d otherwise.
double psi_bar(long long s, long long d, double sigma);
/// max(sigma^2 kappa^2, psi_bar); the quadratic estimator is zero iff kappa^4 < this.
double psi_sigma(long long s, long long d, double sigma, double kappa);
RateValue rate_quadratic(long long s, long long d, double sigma, double kappa);
RateValue rate_quadratic_Bq(double r, double sigma, double q, long long d);

RateValue rate_l2norm(long long s, long long d, double sigma);
RateValue rate_l2norm_Bq(double r, double sigma, double q, long long d);

/// Minimax separation lambda for H0: theta = 0 against the given alternative.
/// For ThetaS / ThetaSStar lambda is a per-coordinate magnitude; for ThetaQU
/// it is an l2 distance. ThetaS with s^2 > d throws UnsupportedRegime.
RateValue testing_rate(const SparsityClass& alternative, double sigma, long long d);

/// The l2-scale separation sqrt(psi^sqrtQ) that the plug-in test compares
/// the norm estimate against. Equals testing_rate for ThetaQU and
/// sqrt(s) * testing_rate for the coordinate-wise alternatives.
double testing_l2_scale(const SparsityClass& alternative, double sigma, long long d);

}  // namespace sparsefunc::rates
