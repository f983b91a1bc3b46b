#include "sparsefunc/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "sparsefunc/errors.hpp"

namespace sparsefunc::gaussian {

namespace {

// Beyond this point the continued fraction for the Mills ratio is used and
// every tail quantity is assembled as exp(log phi(x) + log(...)), so the only
// rounding into the subnormal range happens once at the end.
constexpr double kMillsCutoff = 8.0;
constexpr int kMillsTerms = 120;

constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double log_density(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

// R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
double mills_continued_fraction(double x) noexcept {
  double tail = x;
  for (int k = kMillsTerms; k >= 1; --k) {
    tail = x + static_cast<double>(k) / tail;
  }
  return 1.0 / tail;
}

// P(Y <= z) for a standard normal Y, keeping relative accuracy in both tails.
double cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

TruncationLevel::TruncationLevel(double x) : x_(x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidArgument("truncation level must be finite and nonnegative");
  }
}

TruncationLevel TruncationLevel::sparse_threshold(long long s, long long d) {
  if (s < 1 || d < 1) throw InvalidArgument("sparse_threshold needs s, d >= 1");
  const double ratio = static_cast<double>(d) / (static_cast<double>(s) * static_cast<double>(s));
  return TruncationLevel(std::sqrt(2.0 * std::log1p(ratio)));
}

TruncationLevel TruncationLevel::doubled_threshold(long long m, long long d) {
  if (m < 1 || d < 1) throw InvalidArgument("doubled_threshold needs m, d >= 1");
  const double ratio = static_cast<double>(d) / (static_cast<double>(m) * static_cast<double>(m));
  return TruncationLevel(2.0 * std::sqrt(2.0 * std::log1p(ratio)));
}

double density(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double upper_tail(double x) noexcept {
  if (x >= kMillsCutoff) {
    return std::exp(log_density(x) + std::log(mills_continued_fraction(x)));
  }
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double mills_ratio(double x) noexcept {
  if (x >= kMillsCutoff) return mills_continued_fraction(x);
  return upper_tail(x) / density(x);
}

double tail_prob(TruncationLevel level) noexcept {
  const double x = level.value();
  if (x >= kMillsCutoff) {
    return std::exp(log_density(x) + std::log(2.0 * mills_continued_fraction(x)));
  }
  return std::erfc(x / std::numbers::sqrt2);
}

double truncated_second_moment(TruncationLevel level) noexcept {
  const double x = level.value();
  if (x >= kMillsCutoff) {
    const double r = mills_continued_fraction(x);
    return std::exp(log_density(x) + std::log(2.0 * (x + r)));
  }
  return 2.0 * x * density(x) + tail_prob(level);
}

double truncated_fourth_moment(TruncationLevel level) noexcept {
  const double x = level.value();
  const double poly = x * x * x + 3.0 * x;
  if (x >= kMillsCutoff) {
    const double r = mills_continued_fraction(x);
    return std::exp(log_density(x) + std::log(2.0 * poly + 6.0 * r));
  }
  return 2.0 * poly * density(x) + 3.0 * tail_prob(level);
}

double alpha_constant(TruncationLevel level) noexcept {
  const double x = level.value();
  if (x == 0.0) return 1.0;
  return 1.0 + x / mills_ratio(x);
}

double bias_of_thresholded_mean(double a, double sigma, TruncationLevel tau) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (a == 0.0) return 0.0;
  const double shift = a / sigma;
  const double lo = -tau.value() - shift;
  const double hi = tau.value() - shift;
  // P(lo <= Z <= hi), taken from whichever tail keeps precision.
  double mass = 0.0;
  if (lo >= 0.0) {
    mass = upper_tail(lo) - upper_tail(hi);
  } else if (hi <= 0.0) {
    mass = upper_tail(-hi) - upper_tail(-lo);
  } else {
    mass = cdf(hi) - cdf(lo);
  }
  const double inner_mean = a * mass + sigma * (density(lo) - density(hi));
  return -inner_mean;
}

double tail_lower_bound(double x) noexcept {
  return std::exp(std::log(4.0) + log_density(x) - std::log(x + std::sqrt(x * x + 4.0)));
}

double tail_upper_bound(double x) noexcept {
  return std::exp(std::log(4.0) + log_density(x) - std::log(x + std::sqrt(x * x + 2.0)));
}

double second_moment_upper_bound(double x) noexcept {
  return std::exp(std::log(2.0 * (x + 2.0 / x)) + log_density(x));
}

double fourth_moment_upper_bound(double x) noexcept {
  return std::exp(std::log(2.0 * (x * x * x + 3.0 * x + 1.0 / x)) + log_density(x));
}

}  // namespace sparsefunc::gaussian
