// Runs the seed-pinned acceptance measurements once and freezes them as bands
// [observed / margin, observed * margin] in a JSON fixture file.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "acceptance_grid.hpp"
#include "sparsefunc/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the frozen acceptance bands"};
  std::string out = "tests/fixtures/bands.json";
  unsigned workers = 0;
  app.add_option("--out", out, "Fixture file to write");
  app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  CLI11_PARSE(app, argc, argv);

  using nlohmann::json;
  json doc;
  doc["master_seed"] = acceptance::kMasterSeed;
  doc["n_reps"] = acceptance::kRiskReps;
  doc["margin"] = acceptance::kBandMargin;
  json bands = json::object();
  const auto add = [&](const std::vector<acceptance::Measurement>& ms) {
    for (const auto& m : ms) {
      bands[m.key] = {{"observed", m.value},
                      {"lo", m.value / acceptance::kBandMargin},
                      {"hi", m.value * acceptance::kBandMargin}};
      std::cerr << m.key << " " << m.value << '\n';
    }
  };
  add(acceptance::measure_risk_grid(workers));
  add(acceptance::measure_unknown_noise(workers));
  doc["bands"] = bands;
  const double ratio = acceptance::chebyshev_constant_ratio(workers);
  doc["c_star"] = {{"max_ratio", ratio}, {"value", acceptance::chebyshev_constant(ratio)}};
  std::cerr << "c_star " << acceptance::chebyshev_constant(ratio) << '\n';
  sparsefunc::io::write_text_file(out, doc.dump(2) + "\n");
  return 0;
}
