#include "sparsefunc/lower_bounds.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "sparsefunc/errors.hpp"

namespace sparsefunc::lower_bounds {

namespace {

// log(DBL_MAX), the largest exponent exp() can return finitely.
const double kLogMax = std::log(DBL_MAX);

void require_args(long long s, long long d, double rho) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (s < 1 || s > d) throw InvalidArgument("s must satisfy 1 <= s <= d");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be finite and >= 0");
}

double log_sum_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

// log P(J = j) for j in [lo, s], normalized.
std::vector<double> overlap_log_pmf(long long s, long long d, long long& lo) {
  lo = std::max(0LL, 2 * s - d);
  std::vector<double> logw(static_cast<std::size_t>(s - lo + 1), 0.0);
  for (long long j = lo; j < s; ++j) {
    const auto sj = static_cast<double>(s - j);
    const double num = 2.0 * std::log(sj);
    const double den = std::log(static_cast<double>(j + 1)) +
                       std::log(static_cast<double>(d - 2 * s + j + 1));
    logw[static_cast<std::size_t>(j - lo + 1)] = logw[static_cast<std::size_t>(j - lo)] + num - den;
  }
  const double norm = log_sum_exp(logw);
  for (double& w : logw) w -= norm;
  return logw;
}

// (1 + u)^s - 1 given log1p(u), finishing in the log domain.
double power_minus_one(long long s, double log1p_u) {
  const double exponent = static_cast<double>(s) * log1p_u;
  if (exponent > kLogMax) throw NumericOverflow("chi-square bound exceeds the double range");
  return std::expm1(exponent);
}

// log1p((s/d) * g) where log g is known: stays finite when g itself overflows.
double log1p_scaled(long long s, long long d, double g, double log_g) {
  const double frac = static_cast<double>(s) / static_cast<double>(d);
  if (std::isfinite(g) && g < 1e300) return std::log1p(frac * g);
  const double log_u = std::log(frac) + log_g;
  return log_u + std::log1p(std::exp(-log_u));
}

}  // namespace

std::vector<double> overlap_pmf(long long s, long long d) {
  require_args(s, d, 0.0);
  long long lo = 0;
  const auto logp = overlap_log_pmf(s, d, lo);
  std::vector<double> out(static_cast<std::size_t>(s + 1), 0.0);
  for (long long j = lo; j <= s; ++j) {
    out[static_cast<std::size_t>(j)] = std::exp(logp[static_cast<std::size_t>(j - lo)]);
  }
  return out;
}

double chi2_exact_uniform_prior(long long s, long long d, double rho) {
  require_args(s, d, rho);
  const double r2 = rho * rho;
  long long lo = 0;
  const auto logp = overlap_log_pmf(s, d, lo);
  if (r2 * static_cast<double>(s) < 700.0) {
    double acc = 0.0;
    for (long long j = lo; j <= s; ++j) {
      acc += std::exp(logp[static_cast<std::size_t>(j - lo)]) * std::expm1(r2 * static_cast<double>(j));
    }
    return acc;
  }
  std::vector<double> terms(logp.size());
  for (long long j = lo; j <= s; ++j) {
    terms[static_cast<std::size_t>(j - lo)] =
        logp[static_cast<std::size_t>(j - lo)] + r2 * static_cast<double>(j);
  }
  const double log_mean = log_sum_exp(terms);
  if (log_mean > kLogMax) throw NumericOverflow("chi-square divergence exceeds the double range");
  return std::expm1(log_mean);
}

double chi2_bound_uniform_prior(long long s, long long d, double rho) {
  require_args(s, d, rho);
  const double r2 = rho * rho;
  // g = e^{rho^2} - 1, log g = rho^2 + log(1 - e^{-rho^2}).
  const double g = std::expm1(r2);
  const double log_g = r2 + std::log(-std::expm1(-r2));
  return power_minus_one(s, log1p_scaled(s, d, g, log_g));
}

double chi2_bound_signed_prior(long long s, long long d, double rho) {
  require_args(s, d, rho);
  const double r2 = rho * rho;
  // g = cosh(rho^2) - 1 = 2 sinh^2(rho^2 / 2), without cancellation for small rho.
  const double half = 0.5 * r2;
  const double sh = std::sinh(half);
  const double g = 2.0 * sh * sh;
  // log sinh(x) = x - log 2 + log1p(-e^{-2x}).
  const double log_sinh = half - std::numbers::ln2 + std::log1p(-std::exp(-r2));
  const double log_g = std::numbers::ln2 + 2.0 * log_sinh;
  return power_minus_one(s, log1p_scaled(s, d, g, log_g));
}

DivergenceResult chi2(PriorKind kind, long long s, long long d, double rho, bool with_exact) {
  DivergenceResult out;
  out.s = s;
  out.d = d;
  out.rho = rho;
  if (kind == PriorKind::UniformSigned) {
    out.bound = chi2_bound_signed_prior(s, d, rho);
    if (with_exact) throw UnsupportedRegime("the exact divergence is available for the positive prior only");
  } else {
    out.bound = chi2_bound_uniform_prior(s, d, rho);
    if (with_exact) out.exact = chi2_exact_uniform_prior(s, d, rho);
  }
  return out;
}

double two_point_kl(const ParameterVector& a, const ParameterVector& b, double sigma) {
  if (a.dim() != b.dim()) throw DimensionMismatch("two_point_kl needs equal dimensions");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc / (2.0 * sigma * sigma);
}

Certificate minimax_lower_certificate(const SparsePrior& prior, rates::Functional functional) {
  prior.validate();
  const bool is_signed = prior.kind == PriorKind::UniformSigned;
  if (is_signed && functional == rates::Functional::L) {
    throw NonConstantFunctional("L is not constant on the support of the signed prior");
  }
  const auto s = static_cast<double>(prior.s);
  const double a = prior.amplitude();
  Certificate c;
  switch (functional) {
    case rates::Functional::L: c.v = 0.5 * s * a; break;
    case rates::Functional::Q: c.v = 0.5 * s * a * a; break;
    case rates::Functional::SqrtQ: c.v = 0.5 * a * std::sqrt(s); break;
  }
  const auto d = static_cast<long long>(prior.d);
  c.beta = is_signed ? chi2_bound_signed_prior(prior.s, d, prior.rho)
                     : chi2_bound_uniform_prior(prior.s, d, prior.rho);
  c.log_prob_bound = -c.beta - std::log(4.0);
  c.prob_bound = 0.25 * std::exp(-c.beta);
  c.testing_bound = 1.0 - std::sqrt(c.beta);
  return c;
}

}  // namespace sparsefunc::lower_bounds
