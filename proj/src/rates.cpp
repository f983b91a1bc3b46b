#include "sparsefunc/rates.hpp"

#include <algorithm>
#include <cmath>

#include "sparsefunc/errors.hpp"

namespace sparsefunc::rates {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

void require_sparsity(long long s, long long d) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (s < 1 || s > d) throw InvalidArgument("s must satisfy 1 <= s <= d");
}

void require_q(double q, double lo_open, double hi, bool hi_closed) {
  const bool ok = q > lo_open && (hi_closed ? q <= hi : q < hi);
  if (!ok) throw InvalidArgument("q outside the admissible range");
}

double log_ratio(long long s, long long d) {
  const double sd = static_cast<double>(s);
  return std::log1p(static_cast<double>(d) / (sd * sd));
}

}  // namespace

std::string to_string(Zone zone) {
  switch (zone) {
    case Zone::Dense: return "dense";
    case Zone::Sparse: return "sparse";
    case Zone::Degenerate: return "degenerate";
    case Zone::VarianceDominated: return "variance_dominated";
    case Zone::ZeroEstimator: return "zero_estimator";
  }
  return "unknown";
}

std::string to_string(Functional functional) {
  switch (functional) {
    case Functional::L: return "L";
    case Functional::Q: return "Q";
    case Functional::SqrtQ: return "sqrtQ";
  }
  return "unknown";
}

bool below_sqrt(long long s, long long d) noexcept {
  if (s <= 0) return d > 0;
  const long long q = d / s;
  return s < q || (s == q && d % s != 0);
}

bool at_most_sqrt(long long s, long long d) noexcept {
  if (s <= 0) return d >= 0;
  return s <= d / s;
}

long long floor_sqrt(long long d) noexcept {
  if (d <= 0) return 0;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(d)));
  while (r > 0 && !at_most_sqrt(r, d)) --r;
  while (at_most_sqrt(r + 1, d)) ++r;
  return r;
}

long long ceil_sqrt(long long d) noexcept {
  const long long r = floor_sqrt(d);
  return r * r == d ? r : r + 1;
}

long long effective_sparsity(double r, double sigma, double q, long long d) {
  require_positive(r, "r");
  require_positive(sigma, "sigma");
  require_q(q, 0.0, 2.0, true);
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const double sigma2 = sigma * sigma;
  const double r2 = r * r;
  long long m = 0;
  for (long long s = 1; s <= d; ++s) {
    const double lhs = sigma2 * log_ratio(s, d);
    const double rhs = r2 * std::pow(static_cast<double>(s), -2.0 / q);
    if (lhs <= rhs) m = s;
  }
  return m;
}

RateValue rate_linear_B0(long long s, long long d, double sigma) {
  require_sparsity(s, d);
  require_positive(sigma, "sigma");
  const double sd = static_cast<double>(s);
  RateValue out;
  out.functional = Functional::L;
  out.value = sigma * sigma * sd * sd * log_ratio(s, d);
  out.zone = below_sqrt(s, d) ? Zone::Sparse : Zone::Dense;
  out.equivalent = rate_linear_B0_min_form(s, d, sigma);
  return out;
}

double rate_linear_B0_min_form(long long s, long long d, double sigma) {
  require_sparsity(s, d);
  const double sd = static_cast<double>(s);
  const double sigma2 = sigma * sigma;
  return std::min(sigma2 * sd * sd * log_ratio(s, d), sigma2 * static_cast<double>(d));
}

RateValue rate_linear_Bq(double r, double sigma, double q, long long d) {
  require_q(q, 0.0, 1.0, true);
  const long long m = effective_sparsity(r, sigma, q, d);
  RateValue out;
  out.functional = Functional::L;
  out.m = m;
  if (m == 0) {
    out.value = r * r;
    out.zone = Zone::Degenerate;
    return out;
  }
  const double md = static_cast<double>(m);
  out.value = sigma * sigma * md * md * log_ratio(m, d);
  if (at_most_sqrt(m, d)) {
    out.zone = Zone::Sparse;
  } else {
    out.zone = Zone::Dense;
    out.equivalent = sigma * sigma * static_cast<double>(d);
  }
  return out;
}

double psi_bar(long long s, long long d, double sigma) {
  require_sparsity(s, d);
  require_positive(sigma, "sigma");
  const double sigma4 = std::pow(sigma, 4);
  if (below_sqrt(s, d)) {
    const double sd = static_cast<double>(s);
    const double lg = log_ratio(s, d);
    return sigma4 * sd * sd * lg * lg;
  }
  return sigma4 * static_cast<double>(d);
}

double psi_sigma(long long s, long long d, double sigma, double kappa) {
  require_positive(kappa, "kappa");
  return std::max(sigma * sigma * kappa * kappa, psi_bar(s, d, sigma));
}

RateValue rate_quadratic(long long s, long long d, double sigma, double kappa) {
  const double bar = psi_bar(s, d, sigma);
  const double variance_term = sigma * sigma * kappa * kappa;
  const double gate = psi_sigma(s, d, sigma, kappa);
  const double kappa4 = std::pow(kappa, 4);
  RateValue out;
  out.functional = Functional::Q;
  out.value = std::min(kappa4, gate);
  if (kappa4 < gate) {
    out.zone = Zone::ZeroEstimator;
  } else if (variance_term > bar) {
    out.zone = Zone::VarianceDominated;
  } else {
    out.zone = below_sqrt(s, d) ? Zone::Sparse : Zone::Dense;
  }
  return out;
}

RateValue rate_quadratic_Bq(double r, double sigma, double q, long long d) {
  require_q(q, 0.0, 2.0, false);
  const long long m = effective_sparsity(r, sigma, q, d);
  RateValue out;
  out.functional = Functional::Q;
  out.m = m;
  if (m == 0) {
    out.value = std::pow(r, 4);
    out.zone = Zone::Degenerate;
    return out;
  }
  const double variance_term = sigma * sigma * r * r;
  double noise_term = 0.0;
  Zone noise_zone = Zone::Sparse;
  if (at_most_sqrt(m, d)) {
    const double md = static_cast<double>(m);
    const double lg = log_ratio(m, d);
    noise_term = std::pow(sigma, 4) * md * md * lg * lg;
  } else {
    noise_term = std::pow(sigma, 4) * static_cast<double>(d);
    noise_zone = Zone::Dense;
  }
  out.value = std::max(variance_term, noise_term);
  out.zone = variance_term > noise_term ? Zone::VarianceDominated : noise_zone;
  return out;
}

RateValue rate_l2norm(long long s, long long d, double sigma) {
  require_sparsity(s, d);
  require_positive(sigma, "sigma");
  RateValue out;
  out.functional = Functional::SqrtQ;
  if (below_sqrt(s, d)) {
    out.value = sigma * sigma * static_cast<double>(s) * log_ratio(s, d);
    out.zone = Zone::Sparse;
  } else {
    out.value = sigma * sigma * std::sqrt(static_cast<double>(d));
    out.zone = Zone::Dense;
  }
  return out;
}

RateValue rate_l2norm_Bq(double r, double sigma, double q, long long d) {
  require_q(q, 0.0, 2.0, false);
  const long long m = effective_sparsity(r, sigma, q, d);
  RateValue out;
  out.functional = Functional::SqrtQ;
  out.m = m;
  if (m == 0) {
    out.value = r * r;
    out.zone = Zone::Degenerate;
  } else if (at_most_sqrt(m, d)) {
    out.value = sigma * sigma * static_cast<double>(m) * log_ratio(m, d);
    out.zone = Zone::Sparse;
  } else {
    out.value = sigma * sigma * std::sqrt(static_cast<double>(d));
    out.zone = Zone::Dense;
  }
  return out;
}

RateValue testing_rate(const SparsityClass& alternative, double sigma, long long d) {
  require_positive(sigma, "sigma");
  RateValue out;
  out.functional = Functional::SqrtQ;
  switch (alternative.tag) {
    case ClassTag::ThetaQU: {
      const RateValue psi = alternative.q == 0.0
                                ? rate_l2norm(alternative.s, d, sigma)
                                : rate_l2norm_Bq(alternative.r, sigma, alternative.q, d);
      out.value = std::sqrt(psi.value);
      out.zone = psi.zone;
      out.m = psi.m;
      return out;
    }
    case ClassTag::ThetaS: {
      require_sparsity(alternative.s, d);
      if (!at_most_sqrt(alternative.s, d)) {
        throw UnsupportedRegime("no testing rate for Theta_s with s > sqrt(d)");
      }
      out.value = sigma * std::sqrt(log_ratio(alternative.s, d));
      out.zone = Zone::Sparse;
      return out;
    }
    case ClassTag::ThetaSStar: {
      require_sparsity(alternative.s, d);
      if (below_sqrt(alternative.s, d)) {
        out.value = sigma * std::sqrt(log_ratio(alternative.s, d));
        out.zone = Zone::Sparse;
      } else {
        out.value = sigma * std::pow(static_cast<double>(d), 0.25) /
                    std::sqrt(static_cast<double>(alternative.s));
        out.zone = Zone::Dense;
      }
      return out;
    }
    default:
      throw InvalidArgument("testing_rate needs a ThetaQU, ThetaS or ThetaSStar alternative");
  }
}

double testing_l2_scale(const SparsityClass& alternative, double sigma, long long d) {
  const RateValue lambda = testing_rate(alternative, sigma, d);
  if (alternative.tag == ClassTag::ThetaQU) return lambda.value;
  return lambda.value * std::sqrt(static_cast<double>(alternative.s));
}

}  // namespace sparsefunc::rates
