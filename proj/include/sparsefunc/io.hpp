#pragma once

// Serialization of parameter vectors and observations (JSON record and
// one-vector-per-line CSV) plus an RFC-4180 CSV writer. Formats are described
// in docs/formats.md and schemas/.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sparsefunc/model.hpp"

namespace sparsefunc::io {

/// {d, theta?, sigma?, y?}. At least one of theta and y is present and every
/// present vector has length d.
struct VectorRecord {
  std::size_t d = 0;
  std::optional<std::vector<double>> theta;
  std::optional<double> sigma;
  std::optional<std::vector<double>> y;

  void validate() const;
};

VectorRecord parse_record_json(const std::string& text);
std::string to_json(const VectorRecord& record);

/// Lines of the form `label,v1,...,vd` with label in {theta, y, sigma};
/// blank lines and lines starting with '#' are skipped.
VectorRecord parse_record_csv(const std::string& text);
std::string to_csv(const VectorRecord& record);

/// Picks the parser from the extension (.json or .csv).
VectorRecord read_record(const std::string& path);
void write_record(const std::string& path, const VectorRecord& record);

VectorRecord make_record(const ParameterVector& theta);
VectorRecord make_record(const ObservationBatch& obs);
ParameterVector theta_of(const VectorRecord& record);
/// `sigma` overrides the record's own sigma; one of them must be present.
ObservationBatch observation_of(const VectorRecord& record,
                                std::optional<double> sigma = std::nullopt);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// RFC-4180 writer: fields containing a comma, quote, CR or LF are quoted,
/// quotes doubled, rows terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);
  static std::string quote(const std::string& field);

 private:
  std::ostream& out_;
};

/// Splits one RFC-4180 record (no embedded newlines) into fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace sparsefunc::io
