#include "sparsefunc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sparsefunc/errors.hpp"
#include "sparsefunc/gaussian.hpp"
#include "sparsefunc/rates.hpp"

namespace sparsefunc {

namespace {

bool finite_positive(double v) { return v > 0.0 && std::isfinite(v); }

void require_sparsity(long long s, std::size_t d) {
  if (s < 1 || static_cast<std::size_t>(s) > d) {
    throw InvalidArgument("sparsity s must satisfy 1 <= s <= d");
  }
}

bool within_upper(double value, double bound) {
  return value <= bound * (1.0 + kMembershipRelTol);
}

bool within_lower(double value, double bound) {
  return value >= bound * (1.0 - kMembershipRelTol);
}

}  // namespace

// ---------------------------------------------------------------------------
// ParameterVector

ParameterVector::ParameterVector(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw InvalidArgument("parameter vector must have d >= 1");
  for (double v : theta_) {
    if (!std::isfinite(v)) throw InvalidArgument("parameter vector entries must be finite");
  }
}

ParameterVector ParameterVector::zeros(std::size_t d) {
  return ParameterVector(std::vector<double>(d, 0.0));
}

std::vector<std::size_t> ParameterVector::support() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < theta_.size(); ++j) {
    if (theta_[j] != 0.0) out.push_back(j);
  }
  return out;
}

std::size_t ParameterVector::sparsity() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(theta_.begin(), theta_.end(), [](double v) { return v != 0.0; }));
}

double ParameterVector::lq_norm(double q) const {
  if (!finite_positive(q)) throw InvalidArgument("lq_norm needs q > 0");
  double scale = 0.0;
  for (double v : theta_) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : theta_) {
    if (v != 0.0) acc += std::pow(std::abs(v) / scale, q);
  }
  return scale * std::pow(acc, 1.0 / q);
}

double ParameterVector::linear() const noexcept {
  return std::accumulate(theta_.begin(), theta_.end(), 0.0);
}

double ParameterVector::quadratic() const noexcept {
  double acc = 0.0;
  for (double v : theta_) acc += v * v;
  return acc;
}

double ParameterVector::l2_norm() const noexcept { return std::sqrt(quadratic()); }

double ParameterVector::min_nonzero_magnitude() const noexcept {
  double out = std::numeric_limits<double>::infinity();
  for (double v : theta_) {
    if (v != 0.0) out = std::min(out, std::abs(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ObservationBatch

ObservationBatch::ObservationBatch(std::vector<double> y, double sigma)
    : y_(std::move(y)), sigma_(sigma) {
  if (y_.empty()) throw InvalidArgument("observation must have d >= 1");
  if (!finite_positive(sigma_)) throw InvalidArgument("sigma must be positive and finite");
  for (double v : y_) {
    if (!std::isfinite(v)) throw InvalidArgument("observation entries must be finite");
  }
}

// ---------------------------------------------------------------------------
// SparsityClass

std::string to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::B0: return "B0";
    case ClassTag::Bq: return "Bq";
    case ClassTag::B2CapB0: return "B2_cap_B0";
    case ClassTag::ThetaQU: return "Theta_qu";
    case ClassTag::ThetaS: return "Theta_s";
    case ClassTag::ThetaSStar: return "Theta_s_star";
  }
  return "unknown";
}

SparsityClass SparsityClass::b0(long long s) {
  SparsityClass c;
  c.tag = ClassTag::B0;
  c.s = s;
  return c;
}

SparsityClass SparsityClass::bq(double q, double r) {
  SparsityClass c;
  c.tag = ClassTag::Bq;
  c.q = q;
  c.r = r;
  return c;
}

SparsityClass SparsityClass::b2_cap_b0(double kappa, long long s) {
  SparsityClass c;
  c.tag = ClassTag::B2CapB0;
  c.kappa = kappa;
  c.s = s;
  return c;
}

SparsityClass SparsityClass::theta_qu(double q, double u, double delta) {
  SparsityClass c;
  c.tag = ClassTag::ThetaQU;
  c.q = q;
  c.delta = delta;
  if (q == 0.0) {
    const double rounded = std::round(u);
    if (rounded != u || u < 1.0) {
      throw InvalidArgument("Theta_qu with q = 0 needs an integer sparsity u >= 1");
    }
    c.s = static_cast<long long>(rounded);
  } else {
    c.r = u;
  }
  return c;
}

SparsityClass SparsityClass::theta_s(long long s, double delta) {
  SparsityClass c;
  c.tag = ClassTag::ThetaS;
  c.s = s;
  c.delta = delta;
  return c;
}

SparsityClass SparsityClass::theta_s_star(long long s, double delta) {
  SparsityClass c;
  c.tag = ClassTag::ThetaSStar;
  c.s = s;
  c.delta = delta;
  return c;
}

void SparsityClass::validate(std::size_t d) const {
  if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  switch (tag) {
    case ClassTag::B0:
      require_sparsity(s, d);
      return;
    case ClassTag::Bq:
      if (!(q > 0.0 && q <= 2.0)) throw InvalidArgument("B_q needs q in (0, 2]");
      if (!finite_positive(r)) throw InvalidArgument("B_q needs r > 0");
      return;
    case ClassTag::B2CapB0:
      require_sparsity(s, d);
      if (!finite_positive(kappa)) throw InvalidArgument("B_2 cap B_0 needs kappa > 0");
      return;
    case ClassTag::ThetaQU:
      if (q == 0.0) {
        require_sparsity(s, d);
      } else {
        if (!(q > 0.0 && q < 2.0)) throw InvalidArgument("Theta_qu needs q = 0 or q in (0, 2)");
        if (!finite_positive(r)) throw InvalidArgument("Theta_qu needs u = r > 0");
      }
      if (!finite_positive(delta)) throw InvalidArgument("separation delta must be > 0");
      return;
    case ClassTag::ThetaS:
    case ClassTag::ThetaSStar:
      require_sparsity(s, d);
      if (!finite_positive(delta)) throw InvalidArgument("separation delta must be > 0");
      return;
  }
}

SparsityClass SparsityClass::with_delta(double new_delta) const {
  SparsityClass c = *this;
  c.delta = new_delta;
  return c;
}

bool SparsityClass::sparsity_indexed() const noexcept {
  switch (tag) {
    case ClassTag::B0:
    case ClassTag::B2CapB0:
    case ClassTag::ThetaS:
    case ClassTag::ThetaSStar:
      return true;
    case ClassTag::ThetaQU:
      return q == 0.0;
    case ClassTag::Bq:
      return false;
  }
  return false;
}

std::string SparsityClass::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << to_string(tag) << '(';
  switch (tag) {
    case ClassTag::B0: os << "s=" << s; break;
    case ClassTag::Bq: os << "q=" << q << ",r=" << r; break;
    case ClassTag::B2CapB0: os << "kappa=" << kappa << ",s=" << s; break;
    case ClassTag::ThetaQU:
      if (q == 0.0) {
        os << "q=0,s=" << s;
      } else {
        os << "q=" << q << ",r=" << r;
      }
      os << ",delta=" << delta;
      break;
    case ClassTag::ThetaS:
    case ClassTag::ThetaSStar: os << "s=" << s << ",delta=" << delta; break;
  }
  os << ')';
  return os.str();
}

bool membership(const ParameterVector& theta, const SparsityClass& cls) {
  const auto nnz = static_cast<long long>(theta.sparsity());
  switch (cls.tag) {
    case ClassTag::B0:
      return nnz <= cls.s;
    case ClassTag::Bq:
      return within_upper(theta.lq_norm(cls.q), cls.r);
    case ClassTag::B2CapB0:
      return nnz <= cls.s && within_upper(theta.l2_norm(), cls.kappa);
    case ClassTag::ThetaQU: {
      const bool in_ball =
          cls.q == 0.0 ? nnz <= cls.s : within_upper(theta.lq_norm(cls.q), cls.r);
      return in_ball && within_lower(theta.l2_norm(), cls.delta);
    }
    case ClassTag::ThetaS: {
      if (nnz != cls.s) return false;
      for (double v : theta.values()) {
        if (v != 0.0 && v != cls.delta) return false;
      }
      return true;
    }
    case ClassTag::ThetaSStar:
      return nnz == cls.s && within_lower(theta.min_nonzero_magnitude(), cls.delta);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generation

ObservationBatch generate_observation(const ParameterVector& theta, double sigma,
                                      RandomStream& stream) {
  if (!finite_positive(sigma)) throw InvalidArgument("sigma must be positive and finite");
  std::vector<double> y(theta.dim());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = theta[j] + sigma * stream.normal();
  return ObservationBatch(std::move(y), sigma);
}

ObservationBatch generate_observation(const ParameterVector& theta, double sigma,
                                      std::uint64_t seed) {
  RandomStream stream(seed);
  return generate_observation(theta, sigma, stream);
}

void SparsePrior::validate() const {
  if (d < 1) throw InvalidArgument("prior dimension must be >= 1");
  require_sparsity(s, d);
  if (!finite_positive(rho)) throw InvalidArgument("prior amplitude rho must be > 0");
  if (!finite_positive(sigma)) throw InvalidArgument("prior sigma must be > 0");
}

ParameterVector sample_prior(const SparsePrior& prior, RandomStream& stream) {
  prior.validate();
  const auto d = static_cast<std::int64_t>(prior.d);
  std::vector<std::size_t> index(prior.d);
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::int64_t i = 0; i < prior.s; ++i) {
    const auto j = stream.uniform_int(i, d - 1);
    std::swap(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
  }
  std::vector<double> theta(prior.d, 0.0);
  const double a = prior.amplitude();
  for (std::int64_t i = 0; i < prior.s; ++i) {
    double v = a;
    if (prior.kind == PriorKind::UniformSigned && !stream.coin()) v = -a;
    theta[index[static_cast<std::size_t>(i)]] = v;
  }
  return ParameterVector(std::move(theta));
}

ParameterVector sample_prior(const SparsePrior& prior, std::uint64_t seed) {
  RandomStream stream(seed);
  return sample_prior(prior, stream);
}

ParameterVector equal_spikes(std::size_t d, std::size_t count, double value) {
  if (count > d) throw InvalidArgument("more spikes than coordinates");
  std::vector<double> theta(d, 0.0);
  std::fill_n(theta.begin(), count, value);
  return ParameterVector(std::move(theta));
}

// ---------------------------------------------------------------------------
// Witnesses

namespace {

double log_ratio(long long s, std::size_t d) {
  const double sd = static_cast<double>(s);
  return std::log1p(static_cast<double>(d) / (sd * sd));
}

void add(std::vector<LabeledVector>& out, std::string label, ParameterVector theta) {
  out.push_back(LabeledVector{std::move(label), std::move(theta)});
}

void b0_witnesses(std::vector<LabeledVector>& out, long long s, double sigma, std::size_t d,
                  double cap) {
  const auto count = static_cast<std::size_t>(s);
  const auto ld = static_cast<long long>(d);
  const bool sparse = rates::below_sqrt(s, ld);
  const double rho = std::sqrt(log_ratio(s, d));
  add(out, "prior_spikes", equal_spikes(d, count, std::min(sigma * rho, cap)));
  if (!sparse) {
    const double dense = sigma * std::pow(static_cast<double>(d), 0.25) /
                         std::sqrt(static_cast<double>(s));
    add(out, "prior_spikes_sqrtd", equal_spikes(d, count, std::min(dense, cap)));
  }
  const double x = sparse ? gaussian::TruncationLevel::sparse_threshold(s, ld).value() : 0.0;
  if (sparse) {
    add(out, "threshold_spikes", equal_spikes(d, count, std::min(sigma * x, cap)));
    add(out, "single_threshold_spike", equal_spikes(d, 1, std::min(sigma * x, cap)));
  }
  add(out, "strong_spikes", equal_spikes(d, count, std::min(4.0 * sigma * (1.0 + x), cap)));
}

}  // namespace

std::vector<LabeledVector> worst_case_configs(const SparsityClass& cls, double sigma,
                                              std::size_t d) {
  cls.validate(d);
  if (!finite_positive(sigma)) throw InvalidArgument("sigma must be positive and finite");
  const auto ld = static_cast<long long>(d);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<LabeledVector> out;

  switch (cls.tag) {
    case ClassTag::B0:
      add(out, "zero", ParameterVector::zeros(d));
      b0_witnesses(out, cls.s, sigma, d, inf);
      break;

    case ClassTag::B2CapB0: {
      const double per = cls.kappa / std::sqrt(static_cast<double>(cls.s));
      add(out, "zero", ParameterVector::zeros(d));
      add(out, "two_point", equal_spikes(d, 1, cls.kappa));
      add(out, "equal_spikes_kappa", equal_spikes(d, static_cast<std::size_t>(cls.s), per));
      b0_witnesses(out, cls.s, sigma, d, per);
      break;
    }

    case ClassTag::Bq: {
      add(out, "zero", ParameterVector::zeros(d));
      add(out, "single_spike", equal_spikes(d, 1, cls.r));
      const long long m = rates::effective_sparsity(cls.r, sigma, cls.q, ld);
      const auto boundary = [&](long long k) {
        return cls.r * std::pow(static_cast<double>(k), -1.0 / cls.q);
      };
      const long long root = rates::floor_sqrt(ld);
      if (root > 1) {
        add(out, "sqrtd_spikes_boundary",
            equal_spikes(d, static_cast<std::size_t>(root), boundary(root)));
      }
      if (m >= 1) {
        const auto count = static_cast<std::size_t>(m);
        add(out, "m_spikes_boundary", equal_spikes(d, count, boundary(m)));
        const double rho = std::sqrt(log_ratio(m, d));
        add(out, "prior_spikes", equal_spikes(d, count, std::min(sigma * rho, boundary(m))));
        if (rates::at_most_sqrt(m, ld)) {
          const double x = gaussian::TruncationLevel::doubled_threshold(m, ld).value();
          add(out, "threshold_spikes",
              equal_spikes(d, count, std::min(sigma * x, boundary(m))));
        }
      }
      break;
    }

    case ClassTag::ThetaQU: {
      if (cls.q == 0.0) {
        const auto count = static_cast<std::size_t>(cls.s);
        add(out, "equal_spikes_separation",
            equal_spikes(d, count, cls.delta / std::sqrt(static_cast<double>(cls.s))));
        add(out, "single_spike_separation", equal_spikes(d, 1, cls.delta));
      } else {
        // k equal spikes of l2 norm delta have l_q norm delta k^(1/q - 1/2),
        // so the single spike is the most permissive; m spikes are kept when
        // they still fit in the ball.
        if (within_upper(cls.delta, cls.r)) {
          add(out, "single_spike_separation", equal_spikes(d, 1, cls.delta));
        }
        const long long m = rates::effective_sparsity(cls.r, sigma, cls.q, ld);
        if (m > 1) {
          auto theta = equal_spikes(d, static_cast<std::size_t>(m),
                                    cls.delta / std::sqrt(static_cast<double>(m)));
          if (membership(theta, cls)) add(out, "m_spikes_separation", std::move(theta));
        }
        if (out.empty()) {
          throw WitnessOutsideClass("Theta_qu(" + std::to_string(cls.q) +
                                    ") is empty: delta exceeds the l_q radius");
        }
      }
      break;
    }

    case ClassTag::ThetaS:
      add(out, "prior_spikes_separation",
          equal_spikes(d, static_cast<std::size_t>(cls.s), cls.delta));
      break;

    case ClassTag::ThetaSStar: {
      const auto count = static_cast<std::size_t>(cls.s);
      add(out, "equal_spikes_separation", equal_spikes(d, count, cls.delta));
      std::vector<double> signs(d, 0.0);
      for (std::size_t j = 0; j < count; ++j) signs[j] = (j % 2 == 0) ? cls.delta : -cls.delta;
      add(out, "alternating_spikes_separation", ParameterVector(std::move(signs)));
      break;
    }
  }

  for (const auto& w : out) {
    if (!membership(w.theta, cls)) {
      throw WitnessOutsideClass("witness '" + w.label + "' is not in " + cls.describe());
    }
  }
  return out;
}

}  // namespace sparsefunc
