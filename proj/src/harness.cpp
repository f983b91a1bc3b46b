#include "sparsefunc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sparsefunc/errors.hpp"
#include "sparsefunc/io.hpp"
#include "sparsefunc/parallel.hpp"

namespace sparsefunc::harness {

namespace {

using nlohmann::json;
using estimators::NoiseMode;
using estimators::Variant;
using rates::Functional;

Functional parse_functional(const std::string& s) {
  if (s == "L") return Functional::L;
  if (s == "Q") return Functional::Q;
  if (s == "sqrtQ" || s == "norm") return Functional::SqrtQ;
  throw InvalidArgument("unknown functional: " + s);
}

std::string class_key(ClassTag tag) {
  switch (tag) {
    case ClassTag::B0: return "b0";
    case ClassTag::Bq: return "bq";
    case ClassTag::B2CapB0: return "b2b0";
    default: return to_string(tag);
  }
}

double number_of(const json& v, const std::string& key) {
  if (!v.is_number()) throw InvalidArgument("'" + key + "' must be a number");
  return v.get<double>();
}

long long integer_of(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw InvalidArgument("'" + key + "' must be an integer");
  return v.get<long long>();
}

std::string string_of(const json& v, const std::string& key) {
  if (!v.is_string()) throw InvalidArgument("'" + key + "' must be a string");
  return v.get<std::string>();
}

ExperimentConfig config_from(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  static const std::set<std::string> known = {
      "functional", "class", "d", "s", "q", "r", "kappa", "sigma", "noise", "variant",
      "positive_part", "witnesses", "n_reps", "seed", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown key in experiment config: " + key);
  }
  for (const char* key : {"functional", "class", "d"}) {
    if (!doc.contains(key)) throw InvalidArgument(std::string("experiment config needs '") + key + "'");
  }

  ExperimentConfig c;
  c.functional = parse_functional(string_of(doc.at("functional"), "functional"));
  const long long d = integer_of(doc.at("d"), "d");
  if (d < 1) throw InvalidArgument("'d' must be >= 1");
  c.d = static_cast<std::size_t>(d);

  const std::string cls = string_of(doc.at("class"), "class");
  std::set<std::string> allowed;
  const auto need = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw InvalidArgument("class " + cls + " needs '" + key + "'");
    return doc.at(key);
  };
  if (cls == "b0") {
    c.cls = SparsityClass::b0(integer_of(need("s"), "s"));
    allowed = {"s"};
  } else if (cls == "bq") {
    c.cls = SparsityClass::bq(number_of(need("q"), "q"), number_of(need("r"), "r"));
    allowed = {"q", "r"};
  } else if (cls == "b2b0") {
    c.cls = SparsityClass::b2_cap_b0(number_of(need("kappa"), "kappa"), integer_of(need("s"), "s"));
    allowed = {"kappa", "s"};
  } else {
    throw InvalidArgument("unknown class: " + cls + " (expected b0, bq or b2b0)");
  }
  for (const char* key : {"s", "q", "r", "kappa"}) {
    if (doc.contains(key) && !allowed.count(key)) {
      throw InvalidArgument(std::string("'") + key + "' does not apply to class " + cls);
    }
  }

  if (doc.contains("sigma")) c.sigma = number_of(doc.at("sigma"), "sigma");
  if (doc.contains("noise")) {
    const auto v = string_of(doc.at("noise"), "noise");
    if (v == "known") c.noise = NoiseMode::Known;
    else if (v == "unknown") c.noise = NoiseMode::Unknown;
    else throw InvalidArgument("noise must be 'known' or 'unknown'");
  }
  if (doc.contains("variant")) {
    const auto v = string_of(doc.at("variant"), "variant");
    if (v == "exact_rate") c.variant = Variant::ExactRate;
    else if (v == "adaptive_logd") c.variant = Variant::AdaptiveLogd;
    else throw InvalidArgument("variant must be 'exact_rate' or 'adaptive_logd'");
  }
  if (doc.contains("positive_part")) {
    if (!doc.at("positive_part").is_boolean()) throw InvalidArgument("'positive_part' must be a boolean");
    c.positive_part = doc.at("positive_part").get<bool>();
  }
  if (doc.contains("witnesses")) {
    const auto& w = doc.at("witnesses");
    if (w.is_string() && w.get<std::string>() == "all") {
      c.witnesses.clear();
    } else if (w.is_array()) {
      for (const auto& label : w) c.witnesses.push_back(string_of(label, "witnesses[]"));
    } else {
      throw InvalidArgument("'witnesses' must be \"all\" or an array of labels");
    }
  }
  if (doc.contains("n_reps")) {
    const long long n = integer_of(doc.at("n_reps"), "n_reps");
    if (n < 1) throw InvalidArgument("'n_reps' must be >= 1");
    c.n_reps = static_cast<std::size_t>(n);
  }
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (v.is_number_unsigned()) {
      c.seed = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      c.seed = static_cast<std::uint64_t>(v.get<long long>());
    } else {
      throw InvalidArgument("'seed' must be a nonnegative 64-bit integer");
    }
  }
  if (doc.contains("output")) c.output = string_of(doc.at("output"), "output");
  c.validate();
  return c;
}

json json_of(const ExperimentConfig& c) {
  json doc;
  doc["functional"] = rates::to_string(c.functional);
  doc["class"] = class_key(c.cls.tag);
  doc["d"] = c.d;
  switch (c.cls.tag) {
    case ClassTag::B0: doc["s"] = c.cls.s; break;
    case ClassTag::Bq: doc["q"] = c.cls.q; doc["r"] = c.cls.r; break;
    case ClassTag::B2CapB0: doc["kappa"] = c.cls.kappa; doc["s"] = c.cls.s; break;
    default: break;
  }
  doc["sigma"] = c.sigma;
  doc["noise"] = estimators::to_string(c.noise);
  doc["variant"] = estimators::to_string(c.variant);
  doc["positive_part"] = c.positive_part;
  if (c.witnesses.empty()) {
    doc["witnesses"] = "all";
  } else {
    doc["witnesses"] = c.witnesses;
  }
  doc["n_reps"] = c.n_reps;
  doc["seed"] = c.seed;
  if (!c.output.empty()) doc["output"] = c.output;
  return doc;
}

json json_of(const RiskReport& r) {
  json doc;
  doc["theta_label"] = r.theta_label;
  doc["mean_sq_error"] = r.mean_sq_error;
  doc["std_error"] = r.std_error;
  doc["rate_name"] = r.rate_name;
  doc["rate_value"] = r.rate_value;
  doc["ratio"] = r.ratio;
  doc["zone"] = rates::to_string(r.zone);
  doc["n_reps"] = r.n_reps;
  doc["seed"] = r.seed;
  doc["stream"] = r.stream;
  return doc;
}

bool has_sparsity(const SparsityClass& cls) {
  return cls.tag == ClassTag::B0 || cls.tag == ClassTag::B2CapB0;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_reps < 1) throw InvalidArgument("n_reps must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
  if (cls.tag != ClassTag::B0 && cls.tag != ClassTag::Bq && cls.tag != ClassTag::B2CapB0) {
    throw InvalidArgument("experiments run on b0, bq or b2b0 classes");
  }
  estimator_spec().validate(d);
  if (noise == NoiseMode::Unknown) {
    if (!has_sparsity(cls)) throw UnsupportedRegime("unknown-noise experiments need a sparsity class");
    if (functional == Functional::Q && cls.tag != ClassTag::B2CapB0) {
      throw InvalidArgument("the unknown-noise quadratic experiment needs kappa (class b2b0)");
    }
  }
}

estimators::EstimatorSpec ExperimentConfig::estimator_spec() const {
  estimators::EstimatorSpec spec;
  spec.functional = functional;
  spec.cls = cls;
  spec.noise = noise;
  spec.variant = variant;
  spec.positive_part = positive_part;
  return spec;
}

std::string ExperimentConfig::describe() const {
  std::ostringstream os;
  os << rates::to_string(functional) << " on " << cls.describe() << " d=" << d << " sigma=" << sigma
     << " noise=" << estimators::to_string(noise) << " variant=" << estimators::to_string(variant);
  return os.str();
}

ExperimentConfig parse_config_json(const std::string& text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed experiment config: ") + e.what());
  }
}

std::vector<ExperimentConfig> parse_grid_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed grid: ") + e.what());
  }
  std::vector<ExperimentConfig> out;
  const json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("configs")) {
    if (doc.size() != 1) throw InvalidArgument("a grid object holds only 'configs'");
    list = &doc.at("configs");
    if (!list->is_array()) throw InvalidArgument("'configs' must be an array");
  } else {
    out.push_back(config_from(doc));
    return out;
  }
  for (const auto& item : *list) out.push_back(config_from(item));
  if (out.empty()) throw InvalidArgument("grid is empty");
  return out;
}

std::string to_json(const ExperimentConfig& config) { return json_of(config).dump(2) + "\n"; }

rates::RateValue reference_rate(const ExperimentConfig& c) {
  const auto d = static_cast<long long>(c.d);
  const auto& cls = c.cls;
  const bool ball = cls.tag == ClassTag::Bq;
  if (c.noise == NoiseMode::Unknown) {
    const double logd = std::log(static_cast<double>(c.d));
    const auto s = static_cast<double>(cls.s);
    rates::RateValue out = rates::rate_linear_B0(cls.s, d, c.sigma);
    if (c.functional == Functional::L) {
      if (c.variant == Variant::ExactRate) return out;
      out.value = c.sigma * c.sigma * s * s * logd;
      out.equivalent.reset();
      return out;
    }
    out.functional = Functional::Q;
    out.equivalent.reset();
    const double variance = c.sigma * c.sigma * cls.kappa * cls.kappa;
    const double noise = std::pow(c.sigma, 4) * s * s * logd * logd;
    out.value = std::max(variance, noise);
    out.zone = variance > noise ? rates::Zone::VarianceDominated : rates::Zone::Sparse;
    return out;
  }
  switch (c.functional) {
    case Functional::L:
      return ball ? rates::rate_linear_Bq(cls.r, c.sigma, cls.q, d)
                  : rates::rate_linear_B0(cls.s, d, c.sigma);
    case Functional::Q:
      return ball ? rates::rate_quadratic_Bq(cls.r, c.sigma, cls.q, d)
                  : rates::rate_quadratic(cls.s, d, c.sigma, cls.kappa);
    case Functional::SqrtQ:
      return ball ? rates::rate_l2norm_Bq(cls.r, c.sigma, cls.q, d)
                  : rates::rate_l2norm(cls.s, d, c.sigma);
  }
  throw InvalidArgument("unknown functional");
}

std::string reference_rate_name(const ExperimentConfig& c) {
  if (c.noise == NoiseMode::Unknown) {
    if (c.functional == Functional::Q) return "max(sigma2_kappa2,sigma4_s2_log2d)";
    return c.variant == Variant::ExactRate ? "psi_L" : "sigma2_s2_logd";
  }
  const bool ball = c.cls.tag == ClassTag::Bq;
  switch (c.functional) {
    case Functional::L: return ball ? "psi_L_q" : "psi_L";
    case Functional::Q: return ball ? "psi_Q_q" : "psi_Q";
    case Functional::SqrtQ: return ball ? "psi_sqrtQ_q" : "psi_sqrtQ";
  }
  return "unknown";
}

RiskReport monte_carlo_risk(const ExperimentConfig& config, const ParameterVector& theta,
                            const std::string& theta_label, std::uint64_t stream, unsigned workers) {
  config.validate();
  if (theta.dim() != config.d) throw DimensionMismatch("theta dimension differs from the config's d");
  if (!membership(theta, config.cls)) {
    throw WitnessOutsideClass("theta '" + theta_label + "' is not in " + config.cls.describe());
  }
  const auto spec = config.estimator_spec();
  const double target = estimators::functional_value(config.functional, theta);
  const std::size_t n = config.n_reps;
  std::vector<double> sq(n);
  parallel_for(n, workers, [&](std::size_t i) {
    RandomStream rng(derive_seed(config.seed, stream, i));
    const ObservationBatch obs = generate_observation(theta, config.sigma, rng);
    const double err = estimators::estimate(spec, obs).value - target;
    sq[i] = err * err;
  });

  double sum = 0.0;
  for (double v : sq) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sq) ss += (v - mean) * (v - mean);
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;

  const rates::RateValue rate = reference_rate(config);
  RiskReport r;
  r.mean_sq_error = mean;
  r.std_error = std::sqrt(var / static_cast<double>(n));
  r.rate_value = rate.value;
  r.ratio = rate.value > 0.0 ? mean / rate.value : std::nan("");
  r.zone = rate.zone;
  r.rate_name = reference_rate_name(config);
  r.n_reps = n;
  r.seed = config.seed;
  r.stream = stream;
  r.theta_label = theta_label;
  return r;
}

std::vector<LabeledVector> select_witnesses(const ExperimentConfig& config) {
  auto all = worst_case_configs(config.cls, config.sigma, config.d);
  if (config.witnesses.empty()) return all;
  std::vector<LabeledVector> out;
  for (const auto& label : config.witnesses) {
    auto it = std::find_if(all.begin(), all.end(), [&](const LabeledVector& w) { return w.label == label; });
    if (it == all.end()) {
      throw InvalidArgument("witness '" + label + "' is not generated for " + config.cls.describe());
    }
    out.push_back(*it);
  }
  return out;
}

std::vector<SweepRow> risk_sweep(const std::vector<ExperimentConfig>& grid, unsigned workers) {
  if (grid.empty()) throw InvalidArgument("risk_sweep needs a nonempty grid");
  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& config = grid[c];
    const std::size_t first = rows.size();
    double max_ratio = -std::numeric_limits<double>::infinity();
    for (const auto& w : select_witnesses(config)) {
      SweepRow row;
      row.config_index = c;
      row.config = config;
      row.report = monte_carlo_risk(config, w.theta, w.label, c, workers);
      max_ratio = std::max(max_ratio, row.report.ratio);
      rows.push_back(std::move(row));
    }
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].config_max_ratio = max_ratio;
  }
  return rows;
}

KnownUnknownComparison compare_known_unknown_sigma(const ExperimentConfig& config,
                                                   const ParameterVector& theta, unsigned workers) {
  if (config.functional != Functional::L) {
    throw InvalidArgument("the known/unknown comparison is for the linear functional");
  }
  if (!has_sparsity(config.cls)) throw UnsupportedRegime("the comparison needs a sparsity class");
  if (config.d < 3) throw DimensionTooSmall("unknown-sigma estimators need d >= 3");
  if (!rates::at_most_sqrt(config.cls.s, static_cast<long long>(config.d))) {
    throw UnsupportedRegime("the plug-in linear estimator is defined for s <= sqrt(d) only");
  }
  ExperimentConfig known = config;
  known.noise = NoiseMode::Known;
  known.variant = Variant::ExactRate;
  ExperimentConfig plug_in = config;
  plug_in.noise = NoiseMode::Unknown;
  plug_in.variant = Variant::ExactRate;
  ExperimentConfig adaptive = config;
  adaptive.noise = NoiseMode::Unknown;
  adaptive.variant = Variant::AdaptiveLogd;

  KnownUnknownComparison out;
  out.known = monte_carlo_risk(known, theta, "custom", 0, workers);
  out.plug_in = monte_carlo_risk(plug_in, theta, "custom", 0, workers);
  out.adaptive = monte_carlo_risk(adaptive, theta, "custom", 0, workers);
  return out;
}

std::vector<std::string> sweep_csv_header() {
  return {"schema_version", "config_index", "functional", "class", "d", "s", "q", "r", "kappa",
          "sigma", "noise", "variant", "positive_part", "witness", "n_reps", "seed", "stream",
          "mean_sq_error", "std_error", "rate_name", "rate_value", "zone", "ratio",
          "config_max_ratio"};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  using io::format_double;
  io::CsvWriter writer(out);
  writer.row(sweep_csv_header());
  for (const auto& row : rows) {
    const auto& c = row.config;
    const auto& r = row.report;
    const bool sparse = has_sparsity(c.cls);
    const bool ball = c.cls.tag == ClassTag::Bq;
    writer.row({std::to_string(kCsvSchemaVersion), std::to_string(row.config_index),
                rates::to_string(c.functional), class_key(c.cls.tag), std::to_string(c.d),
                sparse ? std::to_string(c.cls.s) : "", ball ? format_double(c.cls.q) : "",
                ball ? format_double(c.cls.r) : "",
                c.cls.tag == ClassTag::B2CapB0 ? format_double(c.cls.kappa) : "",
                format_double(c.sigma), estimators::to_string(c.noise),
                estimators::to_string(c.variant), c.positive_part ? "true" : "false",
                r.theta_label, std::to_string(r.n_reps), std::to_string(r.seed),
                std::to_string(r.stream), format_double(r.mean_sq_error),
                format_double(r.std_error), r.rate_name, format_double(r.rate_value),
                rates::to_string(r.zone), format_double(r.ratio),
                format_double(row.config_max_ratio)});
  }
}

std::string to_json(const RiskReport& report) { return json_of(report).dump(2) + "\n"; }

std::string to_json(const std::vector<SweepRow>& rows) {
  json doc = json::array();
  for (const auto& row : rows) {
    json item = json_of(row.report);
    item["config_index"] = row.config_index;
    item["config"] = json_of(row.config);
    item["config_max_ratio"] = row.config_max_ratio;
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

}  // namespace sparsefunc::harness
