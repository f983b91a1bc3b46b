#include "sparsefunc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sparsefunc/errors.hpp"

namespace sparsefunc::io {

namespace {

using nlohmann::json;

std::vector<double> to_vector(const json& value, const char* key) {
  if (!value.is_array()) throw InvalidArgument(std::string(key) + " must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) throw InvalidArgument(std::string(key) + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double parse_number(const std::string& field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw InvalidArgument("not a number: '" + field + "'");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void VectorRecord::validate() const {
  if (d < 1) throw InvalidArgument("record needs d >= 1");
  if (!theta && !y) throw InvalidArgument("record needs theta or y");
  if (theta && theta->size() != d) throw DimensionMismatch("theta length differs from d");
  if (y && y->size() != d) throw DimensionMismatch("y length differs from d");
  if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma))) {
    throw InvalidArgument("sigma must be positive and finite");
  }
}

VectorRecord parse_record_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("record must be a JSON object");
  VectorRecord rec;
  for (const auto& [key, value] : doc.items()) {
    if (key == "d") {
      if (!value.is_number_integer() || value.get<long long>() < 1) {
        throw InvalidArgument("d must be a positive integer");
      }
      rec.d = value.get<std::size_t>();
    } else if (key == "theta") {
      rec.theta = to_vector(value, "theta");
    } else if (key == "y") {
      rec.y = to_vector(value, "y");
    } else if (key == "sigma") {
      if (!value.is_number()) throw InvalidArgument("sigma must be a number");
      rec.sigma = value.get<double>();
    } else {
      throw InvalidArgument("unknown key in record: " + key);
    }
  }
  rec.validate();
  return rec;
}

std::string to_json(const VectorRecord& record) {
  record.validate();
  json doc;
  doc["d"] = record.d;
  if (record.theta) doc["theta"] = *record.theta;
  if (record.sigma) doc["sigma"] = *record.sigma;
  if (record.y) doc["y"] = *record.y;
  return doc.dump(2) + "\n";
}

VectorRecord parse_record_csv(const std::string& text) {
  VectorRecord rec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);
    const std::string label = fields.front();
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_number(fields[i]));
    if (label == "theta" || label == "y") {
      auto& slot = label == "theta" ? rec.theta : rec.y;
      if (slot) throw InvalidArgument("duplicate '" + label + "' line");
      if (values.empty()) throw InvalidArgument("'" + label + "' line has no values");
      slot = std::move(values);
    } else if (label == "sigma") {
      if (values.size() != 1) throw InvalidArgument("'sigma' line needs exactly one value");
      rec.sigma = values.front();
    } else {
      throw InvalidArgument("unknown CSV line label: " + label);
    }
  }
  if (rec.theta) rec.d = rec.theta->size();
  else if (rec.y) rec.d = rec.y->size();
  rec.validate();
  return rec;
}

std::string to_csv(const VectorRecord& record) {
  record.validate();
  std::ostringstream out;
  CsvWriter writer(out);
  const auto emit = [&](const char* label, const std::vector<double>& v) {
    std::vector<std::string> fields{label};
    for (double x : v) fields.push_back(format_double(x));
    writer.row(fields);
  };
  if (record.theta) emit("theta", *record.theta);
  if (record.sigma) writer.row({"sigma", format_double(*record.sigma)});
  if (record.y) emit("y", *record.y);
  return out.str();
}

VectorRecord read_record(const std::string& path) {
  const std::string text = read_text_file(path);
  if (ends_with(path, ".json")) return parse_record_json(text);
  if (ends_with(path, ".csv")) return parse_record_csv(text);
  throw InvalidArgument("record file must end in .json or .csv: " + path);
}

void write_record(const std::string& path, const VectorRecord& record) {
  if (ends_with(path, ".json")) {
    write_text_file(path, to_json(record));
  } else if (ends_with(path, ".csv")) {
    write_text_file(path, to_csv(record));
  } else {
    throw InvalidArgument("record file must end in .json or .csv: " + path);
  }
}

VectorRecord make_record(const ParameterVector& theta) {
  VectorRecord rec;
  rec.d = theta.dim();
  rec.theta = std::vector<double>(theta.values().begin(), theta.values().end());
  return rec;
}

VectorRecord make_record(const ObservationBatch& obs) {
  VectorRecord rec;
  rec.d = obs.dim();
  rec.sigma = obs.sigma();
  rec.y = std::vector<double>(obs.y().begin(), obs.y().end());
  return rec;
}

ParameterVector theta_of(const VectorRecord& record) {
  if (!record.theta) throw InvalidArgument("record has no theta");
  return ParameterVector(*record.theta);
}

ObservationBatch observation_of(const VectorRecord& record, std::optional<double> sigma) {
  if (!record.y) throw InvalidArgument("record has no y");
  const auto s = sigma ? sigma : record.sigma;
  if (!s) throw InvalidArgument("no sigma in the record and none given");
  return ObservationBatch(*record.y, *s);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << content;
  if (!out) throw InvalidArgument("write failed: " + path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << '\n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InvalidArgument("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace sparsefunc::io
