#include "sparsefunc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparsefunc/errors.hpp"
#include "sparsefunc/gaussian.hpp"

namespace sparsefunc::estimators {

namespace {

using gaussian::TruncationLevel;

void require_sparsity(long long s, std::size_t d) {
  if (s < 1 || static_cast<std::size_t>(s) > d) {
    throw InvalidArgument("sparsity s must satisfy 1 <= s <= d");
  }
}

double plain_sum(std::span<const double> y) {
  double acc = 0.0;
  for (double v : y) acc += v;
  return acc;
}

double sum_of_squares(std::span<const double> y) {
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return acc;
}

double thresholded_sum(std::span<const double> y, double cut) {
  double acc = 0.0;
  for (double v : y) {
    if (std::abs(v) > cut) acc += v;
  }
  return acc;
}

// sum (y_j^2 - shift) 1{|y_j| > cut}
double thresholded_squares(std::span<const double> y, double cut, double shift) {
  double acc = 0.0;
  for (double v : y) {
    if (std::abs(v) > cut) acc += v * v - shift;
  }
  return acc;
}

Evaluation make(double value, std::string branch, std::optional<double> threshold = {}) {
  Evaluation e;
  e.value = value;
  e.branch = std::move(branch);
  e.threshold = threshold;
  return e;
}

Evaluation debiased_full_sum(const ObservationBatch& obs) {
  const double sigma = obs.sigma();
  return make(sum_of_squares(obs.y()) - static_cast<double>(obs.dim()) * sigma * sigma,
              "debiased_sum");
}

Evaluation sparse_quadratic(const ObservationBatch& obs, TruncationLevel x) {
  const double sigma = obs.sigma();
  const double cut = sigma * x.value();
  const double shift = gaussian::alpha_constant(x) * sigma * sigma;
  return make(thresholded_squares(obs.y(), cut, shift), "thresholded", cut);
}

}  // namespace

// ---------------------------------------------------------------------------
// Known noise level

Evaluation linear_B0_detail(const ObservationBatch& obs, long long s) {
  require_sparsity(s, obs.dim());
  const auto d = static_cast<long long>(obs.dim());
  if (!rates::below_sqrt(s, d)) return make(plain_sum(obs.y()), "plain_sum");
  const double cut = obs.sigma() * TruncationLevel::sparse_threshold(s, d).value();
  return make(thresholded_sum(obs.y(), cut), "thresholded", cut);
}

Evaluation linear_Bq_detail(const ObservationBatch& obs, double r, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("linear estimator on B_q needs q in (0, 1]");
  const auto d = static_cast<long long>(obs.dim());
  const long long m = rates::effective_sparsity(r, obs.sigma(), q, d);
  if (m == 0) return make(0.0, "zero");
  if (!rates::at_most_sqrt(m, d)) return make(plain_sum(obs.y()), "plain_sum");
  const double cut = obs.sigma() * TruncationLevel::doubled_threshold(m, d).value();
  return make(thresholded_sum(obs.y(), cut), "thresholded", cut);
}

Evaluation quadratic_ungated_detail(const ObservationBatch& obs, long long s) {
  require_sparsity(s, obs.dim());
  const auto d = static_cast<long long>(obs.dim());
  if (!rates::below_sqrt(s, d)) return debiased_full_sum(obs);
  return sparse_quadratic(obs, TruncationLevel::sparse_threshold(s, d));
}

Evaluation quadratic_B0_detail(const ObservationBatch& obs, long long s, double kappa) {
  require_sparsity(s, obs.dim());
  const auto d = static_cast<long long>(obs.dim());
  if (std::pow(kappa, 4) < rates::psi_sigma(s, d, obs.sigma(), kappa)) return make(0.0, "zero");
  return quadratic_ungated_detail(obs, s);
}

Evaluation quadratic_Bq_detail(const ObservationBatch& obs, double r, double q) {
  if (!(q > 0.0 && q < 2.0)) throw InvalidArgument("quadratic estimator on B_q needs q in (0, 2)");
  const auto d = static_cast<long long>(obs.dim());
  const long long m = rates::effective_sparsity(r, obs.sigma(), q, d);
  if (m == 0) return make(0.0, "zero");
  if (!rates::at_most_sqrt(m, d)) return debiased_full_sum(obs);
  return sparse_quadratic(obs, TruncationLevel::doubled_threshold(m, d));
}

double linear_B0(const ObservationBatch& obs, long long s) { return linear_B0_detail(obs, s).value; }

double linear_Bq(const ObservationBatch& obs, double r, double q) {
  return linear_Bq_detail(obs, r, q).value;
}

double quadratic_B0(const ObservationBatch& obs, long long s, double kappa) {
  return quadratic_B0_detail(obs, s, kappa).value;
}

double quadratic_positive_part(const ObservationBatch& obs, long long s, double kappa) {
  return std::max(quadratic_B0(obs, s, kappa), 0.0);
}

double quadratic_ungated(const ObservationBatch& obs, long long s) {
  return quadratic_ungated_detail(obs, s).value;
}

double quadratic_Bq(const ObservationBatch& obs, double r, double q) {
  return quadratic_Bq_detail(obs, r, q).value;
}

double l2norm_B0(const ObservationBatch& obs, long long s) {
  return std::sqrt(std::max(quadratic_ungated(obs, s), 0.0));
}

double l2norm_Bq(const ObservationBatch& obs, double r, double q) {
  return std::sqrt(std::max(quadratic_Bq(obs, r, q), 0.0));
}

// ---------------------------------------------------------------------------
// Unknown noise level

double sigma_hat(std::span<const double> y) {
  const std::size_t d = y.size();
  if (d < 3) throw DimensionTooSmall("sigma_hat needs d >= 3");
  const auto ld = static_cast<long long>(d);
  const auto keep = static_cast<std::size_t>(ld - rates::ceil_sqrt(ld));
  std::vector<double> squares(d);
  std::transform(y.begin(), y.end(), squares.begin(), [](double v) { return v * v; });
  std::sort(squares.begin(), squares.end());
  double acc = 0.0;
  for (std::size_t j = 0; j < keep; ++j) acc += squares[j];
  return 3.0 * std::sqrt(acc / static_cast<double>(d));
}

namespace {

Evaluation plug_in_linear(std::span<const double> y, double level, const char* branch) {
  const double sh = sigma_hat(y);
  const double cut = sh * level;
  Evaluation e = make(thresholded_sum(y, cut), branch, cut);
  e.sigma_hat = sh;
  return e;
}

double log_d_level(std::size_t d) { return std::sqrt(2.0 * std::log(static_cast<double>(d))); }

}  // namespace

Evaluation linear_unknown_sigma_detail(std::span<const double> y, long long s) {
  if (y.size() < 3) throw DimensionTooSmall("unknown-sigma estimators need d >= 3");
  require_sparsity(s, y.size());
  const auto d = static_cast<long long>(y.size());
  if (!rates::at_most_sqrt(s, d)) {
    throw UnsupportedRegime("plug-in linear estimator is defined for s <= sqrt(d) only");
  }
  return plug_in_linear(y, TruncationLevel::sparse_threshold(s, d).value(), "thresholded");
}

Evaluation linear_adaptive_detail(std::span<const double> y) {
  if (y.size() < 3) throw DimensionTooSmall("unknown-sigma estimators need d >= 3");
  return plug_in_linear(y, log_d_level(y.size()), "thresholded_logd");
}

Evaluation quadratic_unknown_sigma_detail(std::span<const double> y) {
  if (y.size() < 3) throw DimensionTooSmall("unknown-sigma estimators need d >= 3");
  const double sh = sigma_hat(y);
  const double cut = sh * log_d_level(y.size());
  Evaluation e = make(thresholded_squares(y, cut, 0.0), "thresholded_logd", cut);
  e.sigma_hat = sh;
  return e;
}

double linear_unknown_sigma(std::span<const double> y, long long s) {
  return linear_unknown_sigma_detail(y, s).value;
}

double linear_adaptive(std::span<const double> y) { return linear_adaptive_detail(y).value; }

double quadratic_unknown_sigma(std::span<const double> y) {
  return quadratic_unknown_sigma_detail(y).value;
}

// ---------------------------------------------------------------------------
// Dispatch

std::string to_string(NoiseMode mode) { return mode == NoiseMode::Known ? "known" : "unknown"; }

std::string to_string(Variant variant) {
  return variant == Variant::ExactRate ? "exact_rate" : "adaptive_logd";
}

void EstimatorSpec::validate(std::size_t d) const {
  cls.validate(d);
  using rates::Functional;
  const bool sparse_class = cls.tag == ClassTag::B0 || cls.tag == ClassTag::B2CapB0;
  const bool ball = cls.tag == ClassTag::Bq;
  if (!sparse_class && !ball) {
    throw InvalidArgument("estimators are defined on B0, B2_cap_B0 and Bq only");
  }
  if (noise == NoiseMode::Known) {
    if (variant != Variant::ExactRate) {
      throw UnsupportedRegime("the log(d) variant is defined for unknown noise only");
    }
    switch (functional) {
      case Functional::L:
        if (ball && cls.q > 1.0) throw InvalidArgument("linear estimator on B_q needs q <= 1");
        return;
      case Functional::Q:
        if (cls.tag == ClassTag::B0) {
          throw InvalidArgument("the quadratic estimator on B_0(s) needs kappa (use B2_cap_B0)");
        }
        if (ball && !(cls.q < 2.0)) throw InvalidArgument("quadratic estimator on B_q needs q < 2");
        return;
      case Functional::SqrtQ:
        if (ball && !(cls.q < 2.0)) throw InvalidArgument("norm estimator on B_q needs q < 2");
        return;
    }
    return;
  }
  if (d < 3) throw DimensionTooSmall("unknown-sigma estimators need d >= 3");
  switch (functional) {
    case Functional::L:
      if (variant == Variant::ExactRate) {
        if (!sparse_class) throw UnsupportedRegime("plug-in linear estimator needs a sparsity class");
        if (!rates::at_most_sqrt(cls.s, static_cast<long long>(d))) {
          throw UnsupportedRegime("plug-in linear estimator is defined for s <= sqrt(d) only");
        }
      }
      return;
    case Functional::Q:
      if (variant != Variant::AdaptiveLogd) {
        throw UnsupportedRegime("with unknown noise the quadratic estimator is the log(d) rule");
      }
      return;
    case Functional::SqrtQ:
      throw UnsupportedRegime("no unknown-noise norm estimator is defined");
  }
}

namespace {

Evaluation estimate_known(const EstimatorSpec& spec, const ObservationBatch& obs) {
  using rates::Functional;
  const auto& cls = spec.cls;
  const bool ball = cls.tag == ClassTag::Bq;
  Evaluation e;
  switch (spec.functional) {
    case Functional::L:
      return ball ? linear_Bq_detail(obs, cls.r, cls.q) : linear_B0_detail(obs, cls.s);
    case Functional::Q:
      e = ball ? quadratic_Bq_detail(obs, cls.r, cls.q)
               : quadratic_B0_detail(obs, cls.s, cls.kappa);
      if (spec.positive_part) e.value = std::max(e.value, 0.0);
      return e;
    case Functional::SqrtQ:
      e = ball ? quadratic_Bq_detail(obs, cls.r, cls.q) : quadratic_ungated_detail(obs, cls.s);
      e.value = std::sqrt(std::max(e.value, 0.0));
      return e;
  }
  return e;
}

Evaluation estimate_unknown(const EstimatorSpec& spec, std::span<const double> y) {
  if (spec.functional == rates::Functional::Q) return quadratic_unknown_sigma_detail(y);
  if (spec.variant == Variant::AdaptiveLogd) return linear_adaptive_detail(y);
  return linear_unknown_sigma_detail(y, spec.cls.s);
}

}  // namespace

Evaluation estimate(const EstimatorSpec& spec, std::span<const double> y,
                    std::optional<double> sigma) {
  spec.validate(y.size());
  if (spec.noise == NoiseMode::Unknown) return estimate_unknown(spec, y);
  if (!sigma) throw InvalidArgument("known-noise estimators need sigma");
  return estimate_known(spec, ObservationBatch(std::vector<double>(y.begin(), y.end()), *sigma));
}

Evaluation estimate(const EstimatorSpec& spec, const ObservationBatch& obs) {
  spec.validate(obs.dim());
  if (spec.noise == NoiseMode::Unknown) return estimate_unknown(spec, obs.y());
  return estimate_known(spec, obs);
}

double functional_value(rates::Functional functional, const ParameterVector& theta) {
  switch (functional) {
    case rates::Functional::L: return theta.linear();
    case rates::Functional::Q: return theta.quadratic();
    case rates::Functional::SqrtQ: return theta.l2_norm();
  }
  return 0.0;
}

}  // namespace sparsefunc::estimators
