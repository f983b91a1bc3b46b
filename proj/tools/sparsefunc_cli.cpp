// Command-line front end: rate tables, single estimates, Monte Carlo risk,
// test power curves and chi-square divergences.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sparsefunc/errors.hpp"
#include "sparsefunc/estimators.hpp"
#include "sparsefunc/harness.hpp"
#include "sparsefunc/io.hpp"
#include "sparsefunc/lower_bounds.hpp"
#include "sparsefunc/rates.hpp"
#include "sparsefunc/testing.hpp"

namespace {

using nlohmann::json;
using namespace sparsefunc;

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out;
  std::string format;
  unsigned workers = 0;
};

// Writes to --out when given, stdout otherwise.
void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    io::write_text_file(g.out, text);
  }
}

std::string format_or(const GlobalOptions& g, const std::string& fallback) {
  return g.format.empty() ? fallback : g.format;
}

// ---------------------------------------------------------------------------
// rates

struct RatesArgs {
  std::vector<long long> d;
  std::vector<long long> s;
  double sigma = 1.0;
  std::vector<double> q;
  std::vector<double> r;
  std::vector<double> kappa;
};

struct RateRow {
  std::string rate;
  long long d = 0;
  std::optional<long long> s;
  std::optional<double> q;
  std::optional<double> r;
  std::optional<double> kappa;
  rates::RateValue value;
};

std::vector<RateRow> rate_rows(const RatesArgs& a) {
  std::vector<RateRow> rows;
  for (long long d : a.d) {
    for (long long s : a.s) {
      if (s < 1 || s > d) continue;
      rows.push_back({"psi_L", d, s, {}, {}, {}, rates::rate_linear_B0(s, d, a.sigma)});
      for (double k : a.kappa) {
        rows.push_back({"psi_Q", d, s, {}, {}, k, rates::rate_quadratic(s, d, a.sigma, k)});
      }
      rows.push_back({"psi_sqrtQ", d, s, {}, {}, {}, rates::rate_l2norm(s, d, a.sigma)});
    }
    for (double q : a.q) {
      for (double r : a.r) {
        if (q <= 1.0) rows.push_back({"psi_L_q", d, {}, q, r, {}, rates::rate_linear_Bq(r, a.sigma, q, d)});
        if (q < 2.0) {
          rows.push_back({"psi_Q_q", d, {}, q, r, {}, rates::rate_quadratic_Bq(r, a.sigma, q, d)});
          rows.push_back({"psi_sqrtQ_q", d, {}, q, r, {}, rates::rate_l2norm_Bq(r, a.sigma, q, d)});
        }
      }
    }
  }
  return rows;
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return io::format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

int run_rates(const GlobalOptions& g, const RatesArgs& a) {
  if (a.s.empty() && (a.q.empty() || a.r.empty())) {
    throw InvalidArgument("rates needs --s, or --q together with --r");
  }
  const auto rows = rate_rows(a);
  const std::vector<std::string> header{"rate", "d", "s", "q", "r", "kappa", "sigma", "value", "zone", "m"};
  std::vector<std::vector<std::string>> table;
  for (const auto& row : rows) {
    table.push_back({row.rate, std::to_string(row.d), opt_str(row.s), opt_str(row.q), opt_str(row.r),
                     opt_str(row.kappa), io::format_double(a.sigma), io::format_double(row.value.value),
                     rates::to_string(row.value.zone), opt_str(row.value.m)});
  }
  const std::string fmt = format_or(g, "text");
  std::ostringstream out;
  if (fmt == "csv") {
    io::CsvWriter w(out);
    w.row(header);
    for (const auto& t : table) w.row(t);
  } else if (fmt == "json") {
    json doc = json::array();
    for (const auto& row : rows) {
      json item;
      item["rate"] = row.rate;
      item["d"] = row.d;
      if (row.s) item["s"] = *row.s;
      if (row.q) item["q"] = *row.q;
      if (row.r) item["r"] = *row.r;
      if (row.kappa) item["kappa"] = *row.kappa;
      item["sigma"] = a.sigma;
      item["value"] = row.value.value;
      item["zone"] = rates::to_string(row.value.zone);
      if (row.value.m) item["m"] = *row.value.m;
      doc.push_back(item);
    }
    out << doc.dump(2) << '\n';
  } else {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& t : table) {
      for (std::size_t i = 0; i < t.size(); ++i) width[i] = std::max(width[i], t[i].size());
    }
    const auto line = [&](const std::vector<std::string>& f) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        out << std::left << std::setw(static_cast<int>(width[i])) << f[i] << (i + 1 < f.size() ? "  " : "\n");
      }
    };
    line(header);
    for (const auto& t : table) line(t);
  }
  emit(g, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// estimate / sigma-hat

struct EstimateArgs {
  std::string input;
  std::string functional = "L";
  std::string cls = "b0";
  long long s = 0;
  double q = 0.0;
  double r = 0.0;
  double kappa = 0.0;
  std::string sigma;
  bool adaptive = false;
  bool positive_part = false;
};

rates::Functional functional_of(const std::string& name) {
  if (name == "L") return rates::Functional::L;
  if (name == "Q") return rates::Functional::Q;
  if (name == "norm" || name == "sqrtQ") return rates::Functional::SqrtQ;
  throw InvalidArgument("unknown functional: " + name);
}

SparsityClass class_of(const EstimateArgs& a) {
  if (a.cls == "b0") return SparsityClass::b0(a.s);
  if (a.cls == "bq") return SparsityClass::bq(a.q, a.r);
  if (a.cls == "b2b0") return SparsityClass::b2_cap_b0(a.kappa, a.s);
  throw InvalidArgument("unknown class: " + a.cls);
}

int run_estimate(const GlobalOptions& g, const EstimateArgs& a) {
  const auto record = io::read_record(a.input);
  if (!record.y) throw InvalidArgument("input has no y");
  estimators::EstimatorSpec spec;
  spec.functional = functional_of(a.functional);
  spec.cls = class_of(a);
  spec.positive_part = a.positive_part;
  std::optional<double> sigma = record.sigma;
  if (a.sigma == "unknown") {
    spec.noise = estimators::NoiseMode::Unknown;
    sigma.reset();
  } else if (!a.sigma.empty()) {
    try {
      sigma = std::stod(a.sigma);
    } catch (const std::exception&) {
      throw InvalidArgument("--sigma must be a number or 'unknown'");
    }
  }
  if (a.adaptive) {
    spec.noise = estimators::NoiseMode::Unknown;
    spec.variant = estimators::Variant::AdaptiveLogd;
  }
  const auto e = estimators::estimate(spec, *record.y, sigma);
  json doc;
  doc["functional"] = rates::to_string(spec.functional);
  doc["class"] = spec.cls.describe();
  doc["noise"] = estimators::to_string(spec.noise);
  doc["variant"] = estimators::to_string(spec.variant);
  doc["value"] = e.value;
  doc["branch"] = e.branch;
  if (e.threshold) doc["threshold"] = *e.threshold;
  if (e.sigma_hat) doc["sigma_hat"] = *e.sigma_hat;
  emit(g, doc.dump(2) + "\n");
  return 0;
}

int run_sigma_hat(const GlobalOptions& g, const std::string& input) {
  const auto record = io::read_record(input);
  if (!record.y) throw InvalidArgument("input has no y");
  json doc;
  doc["d"] = record.d;
  doc["sigma_hat"] = estimators::sigma_hat(*record.y);
  emit(g, doc.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// mc-risk / risk-sweep

void apply_seed(const GlobalOptions& g, harness::ExperimentConfig& c) {
  if (g.seed_given) c.seed = g.seed;
}

std::string render_rows(const GlobalOptions& g, const std::vector<harness::SweepRow>& rows) {
  if (format_or(g, "csv") == "json") return harness::to_json(rows);
  if (format_or(g, "csv") != "csv") throw InvalidArgument("--format must be csv or json here");
  std::ostringstream out;
  harness::write_sweep_csv(out, rows);
  return out.str();
}

int run_mc_risk(GlobalOptions g, const std::string& config_path, const std::string& theta_path) {
  auto config = harness::parse_config_json(io::read_text_file(config_path));
  apply_seed(g, config);
  if (g.out.empty()) g.out = config.output;
  std::vector<harness::SweepRow> rows;
  if (theta_path.empty()) {
    rows = harness::risk_sweep({config}, g.workers);
  } else {
    harness::SweepRow row;
    row.config = config;
    row.report = harness::monte_carlo_risk(config, io::theta_of(io::read_record(theta_path)), "custom", 0,
                                           g.workers);
    row.config_max_ratio = row.report.ratio;
    rows.push_back(std::move(row));
  }
  emit(g, render_rows(g, rows));
  return 0;
}

int run_risk_sweep(const GlobalOptions& g, const std::string& grid_path) {
  auto grid = harness::parse_grid_json(io::read_text_file(grid_path));
  for (auto& c : grid) apply_seed(g, c);
  emit(g, render_rows(g, harness::risk_sweep(grid, g.workers)));
  return 0;
}

// ---------------------------------------------------------------------------
// test-power

struct PowerArgs {
  std::string alt = "theta-qu";
  long long s = 0;
  double q = 0.0;
  double u = 0.0;
  long long d = 0;
  double sigma = 1.0;
  std::vector<double> A_grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::size_t reps = 1000;
};

int run_test_power(const GlobalOptions& g, const PowerArgs& a) {
  testing::TestSpec spec;
  if (a.alt == "theta-qu") {
    const double u = a.q == 0.0 ? (a.u > 0.0 ? a.u : static_cast<double>(a.s)) : a.u;
    spec.alternative = SparsityClass::theta_qu(a.q, u, 1.0);
  } else if (a.alt == "theta-s") {
    spec.alternative = SparsityClass::theta_s(a.s, 1.0);
  } else if (a.alt == "theta-s-star") {
    spec.alternative = SparsityClass::theta_s_star(a.s, 1.0);
  } else {
    throw InvalidArgument("--alt must be theta-qu, theta-s or theta-s-star");
  }
  if (a.d < 1) throw InvalidArgument("--d must be >= 1");
  spec.d = static_cast<std::size_t>(a.d);
  spec.sigma = a.sigma;

  const std::string fmt = format_or(g, "csv");
  std::ostringstream out;
  io::CsvWriter w(out);
  json doc = json::array();
  if (fmt == "csv") w.row({"A", "type_one", "max_type_two", "total", "stderr_total", "max_witness"});
  for (double A : a.A_grid) {
    spec.A = A;
    const auto report = testing::evaluate_test_risk(spec, testing::default_witnesses(spec), a.reps, g.seed,
                                                    g.workers);
    const std::string& label = report.witness_labels[report.max_witness];
    if (fmt == "csv") {
      w.row({io::format_double(A), io::format_double(report.type_one), io::format_double(report.max_type_two),
             io::format_double(report.total), io::format_double(report.stderr_total), label});
    } else {
      json item;
      item["A"] = A;
      item["type_one"] = report.type_one;
      item["max_type_two"] = report.max_type_two;
      item["total"] = report.total;
      item["stderr_total"] = report.stderr_total;
      item["max_witness"] = label;
      item["replications"] = report.replications;
      item["seed"] = report.seed;
      doc.push_back(item);
    }
  }
  if (fmt == "json") {
    out << doc.dump(2) << '\n';
  } else if (fmt != "csv") {
    throw InvalidArgument("--format must be csv or json here");
  }
  emit(g, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// chi2

int run_chi2(const GlobalOptions& g, long long s, long long d, double rho, bool is_signed, bool exact) {
  const auto kind = is_signed ? PriorKind::UniformSigned : PriorKind::UniformPositive;
  const auto res = lower_bounds::chi2(kind, s, d, rho, exact);
  json doc;
  if (res.exact) doc["exact"] = *res.exact;
  doc["bound"] = res.bound;
  doc["rho"] = res.rho;
  doc["s"] = res.s;
  doc["d"] = res.d;
  doc["prior"] = is_signed ? "signed" : "positive";
  emit(g, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax estimation of sparse functionals in the Gaussian sequence model"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--workers", g.workers, "Worker threads (0 = hardware concurrency)");

  RatesArgs ra;
  auto* rates_cmd = app.add_subcommand("rates", "Tabulate the minimax rates and zones");
  rates_cmd->add_option("--d", ra.d, "Dimensions")->required()->delimiter(',');
  rates_cmd->add_option("--s", ra.s, "Sparsity levels")->delimiter(',');
  rates_cmd->add_option("--sigma", ra.sigma, "Noise level");
  rates_cmd->add_option("--q", ra.q, "l_q exponents")->delimiter(',');
  rates_cmd->add_option("--r", ra.r, "l_q radii")->delimiter(',');
  rates_cmd->add_option("--kappa", ra.kappa, "l_2 radii for the quadratic rate")->delimiter(',');

  EstimateArgs ea;
  auto* est_cmd = app.add_subcommand("estimate", "Apply one estimator to an observation file");
  est_cmd->add_option("--input", ea.input, "Observation (.json or .csv)")->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--functional", ea.functional)->check(CLI::IsMember({"L", "Q", "norm", "sqrtQ"}));
  est_cmd->add_option("--class", ea.cls)->check(CLI::IsMember({"b0", "bq", "b2b0"}));
  est_cmd->add_option("--s", ea.s);
  est_cmd->add_option("--q", ea.q);
  est_cmd->add_option("--r", ea.r);
  est_cmd->add_option("--kappa", ea.kappa);
  est_cmd->add_option("--sigma", ea.sigma, "Noise level, or 'unknown'");
  est_cmd->add_flag("--adaptive", ea.adaptive, "Use the sqrt(2 log d) plug-in rule");
  est_cmd->add_flag("--positive-part", ea.positive_part);

  std::string sigma_input;
  auto* sig_cmd = app.add_subcommand("sigma-hat", "Noise over-estimate from an observation file");
  sig_cmd->add_option("--input", sigma_input)->required()->check(CLI::ExistingFile);

  std::string config_path;
  std::string theta_path;
  auto* mc_cmd = app.add_subcommand("mc-risk", "Monte Carlo risk of one experiment config");
  mc_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  mc_cmd->add_option("--theta", theta_path, "Parameter file; default runs the class witnesses")
      ->check(CLI::ExistingFile);

  std::string grid_path;
  auto* sweep_cmd = app.add_subcommand("risk-sweep", "Monte Carlo risk over a grid of configs");
  sweep_cmd->add_option("--grid", grid_path)->required()->check(CLI::ExistingFile);

  PowerArgs pa;
  auto* power_cmd = app.add_subcommand("test-power", "Risk of the plug-in test along an A grid");
  power_cmd->add_option("--alt", pa.alt)->check(CLI::IsMember({"theta-qu", "theta-s", "theta-s-star"}));
  power_cmd->add_option("--s", pa.s);
  power_cmd->add_option("--q", pa.q);
  power_cmd->add_option("--u", pa.u, "Radius r (q > 0) or sparsity (q = 0)");
  power_cmd->add_option("--d", pa.d)->required();
  power_cmd->add_option("--sigma", pa.sigma);
  power_cmd->add_option("--A-grid", pa.A_grid)->delimiter(',');
  power_cmd->add_option("--reps", pa.reps);

  long long cs = 0;
  long long cd = 0;
  double rho = 0.0;
  bool is_signed = false;
  bool exact = false;
  auto* chi_cmd = app.add_subcommand("chi2", "Chi-square divergence of the sparse prior mixture");
  chi_cmd->add_option("--s", cs)->required();
  chi_cmd->add_option("--d", cd)->required();
  chi_cmd->add_option("--rho", rho)->required();
  chi_cmd->add_flag("--signed", is_signed);
  chi_cmd->add_flag("--exact", exact);

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*rates_cmd) return run_rates(g, ra);
    if (*est_cmd) return run_estimate(g, ea);
    if (*sig_cmd) return run_sigma_hat(g, sigma_input);
    if (*mc_cmd) return run_mc_risk(g, config_path, theta_path);
    if (*sweep_cmd) return run_risk_sweep(g, grid_path);
    if (*power_cmd) return run_test_power(g, pa);
    if (*chi_cmd) return run_chi2(g, cs, cd, rho, is_signed, exact);
  } catch (const sparsefunc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
