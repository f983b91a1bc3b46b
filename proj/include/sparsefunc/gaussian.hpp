#pragma once

// Standard-normal primitives used by the thresholding estimators: two-sided
// tails, truncated moments, the bias-correction constant and the closed-form
// bias of a hard-thresholded Gaussian mean. Closed forms go through
// std::erfc; the Mills ratio takes over where the tail underflows.

namespace sparsefunc::gaussian {

/// Threshold measured in standard-deviation units. Always finite and >= 0.
class TruncationLevel {
 public:
  explicit TruncationLevel(double x);

  double value() const noexcept { return x_; }

  /// sqrt(2 log(1 + d/s^2)): the sparse-zone threshold for B_0(s).
  static TruncationLevel sparse_threshold(long long s, long long d);
  /// 2 sqrt(2 log(1 + d/m^2)): the doubled threshold used on l_q balls.
  static TruncationLevel doubled_threshold(long long m, long long d);

 private:
  double x_;
};

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2OverPi = 0.797884560802865355879892119869;

/// Standard normal density.
double density(double x) noexcept;

/// P(X > x), one-sided.
double upper_tail(double x) noexcept;

/// P(|X| > x).
double tail_prob(TruncationLevel x) noexcept;

/// E[X^2 1{|X| > x}] = 2 x phi(x) + P(|X| > x).
double truncated_second_moment(TruncationLevel x) noexcept;

/// E[X^4 1{|X| > x}] = 2 (x^3 + 3x) phi(x) + 3 P(|X| > x).
double truncated_fourth_moment(TruncationLevel x) noexcept;

/// Mills ratio P(X > x) / phi(x), accurate for every x >= 0 including the
/// range where P(X > x) underflows.
double mills_ratio(double x) noexcept;

/// E(X^2 | |X| > x) = 1 + x / mills_ratio(x). Never fails: past the
/// underflow point of the tail the ratio is taken from the continued fraction.
double alpha_constant(TruncationLevel x) noexcept;

/// B(a) = E[y 1{|y| > sigma tau}] - a = -E[y 1{|y| <= sigma tau}] for
/// y ~ N(a, sigma^2).
double bias_of_thresholded_mean(double a, double sigma, TruncationLevel tau);

// Two-sided tail sandwich and the moment upper bounds, valid for x > 0.
double tail_lower_bound(double x) noexcept;
double tail_upper_bound(double x) noexcept;
double second_moment_upper_bound(double x) noexcept;
double fourth_moment_upper_bound(double x) noexcept;

}  // namespace sparsefunc::gaussian
