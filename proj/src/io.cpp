#include "hplb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hplb/errors.hpp"

namespace hplb {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void row_error(long row, const std::string& what) {
  throw ParameterError("row " + std::to_string(row) + ": " + what);
}

double parse_real(const std::string& field, long row) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    row_error(row, "'" + field + "' is not a finite number");
  }
  return value;
}

long parse_int(const std::string& field, long row) {
  long value = 0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    row_error(row, "'" + field + "' is not an integer label");
  }
  return value;
}

// Calls fn(fields, row) for every data row; returns the header column count.
template <typename Fn>
std::size_t for_each_row(std::istream& in, std::size_t min_columns, Fn&& fn) {
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("empty input: header row required");
  const std::size_t columns = split_fields(line).size();
  if (columns < min_columns) {
    throw ParameterError("header has " + std::to_string(columns) + " columns, expected at least " +
                         std::to_string(min_columns));
  }
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != columns) {
      row_error(row, "expected " + std::to_string(columns) + " fields, found " +
                         std::to_string(fields.size()));
    }
    fn(fields, row);
  }
  return columns;
}

std::string nan_or(double x, std::string (*fmt)(double)) {
  return std::isnan(x) ? std::string("nan") : fmt(x);
}

json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double real_of(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json hplb_json(const HPLBResult& r) {
  json j{{"value", r.value}, {"method", std::string(to_string(r.method))}, {"alpha", r.alpha}};
  if (r.diagnostics) {
    j["diagnostics"] = {{"argmax_z", r.diagnostics->argmax_z},
                        {"evaluations", r.diagnostics->evaluations},
                        {"band", std::string(to_string(r.diagnostics->band))}};
  } else {
    j["diagnostics"] = nullptr;
  }
  return j;
}

HPLBResult hplb_of(const json& j) {
  HPLBResult r;
  r.value = j.at("value").get<double>();
  r.method = method_from_string(j.at("method").get<std::string>());
  r.alpha = j.at("alpha").get<double>();
  if (j.contains("diagnostics") && !j["diagnostics"].is_null()) {
    const auto& d = j["diagnostics"];
    r.diagnostics = Diagnostics{d.at("argmax_z").get<int>(), d.at("evaluations").get<int>(),
                                band_from_string(d.at("band").get<std::string>())};
  }
  return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------- parsing

LabeledScores parse_two_sample(std::istream& in, std::uint64_t tie_seed) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  const std::size_t columns = for_each_row(in, 2, [&](const auto& f, long row) {
    const double s = parse_real(f[0], row);
    const long label = parse_int(f[1], row);
    if (label != 0 && label != 1) row_error(row, "label must be 0 or 1, found " + f[1]);
    scores.push_back(s);
    labels.push_back(static_cast<std::uint8_t>(label));
  });
  if (columns != 2) throw ParameterError("two-sample format needs exactly 2 columns (score,label)");
  if (scores.empty()) throw ParameterError("no data rows");
  return LabeledScores(std::move(scores), std::move(labels), tie_seed);
}

std::vector<OrderedObservation> parse_ordered(std::istream& in) {
  std::vector<OrderedObservation> out;
  const std::size_t columns = for_each_row(in, 2, [&](const auto& f, long row) {
    out.push_back({parse_real(f[0], row), parse_real(f[1], row)});
  });
  if (columns != 2) throw ParameterError("ordered format needs exactly 2 columns (t,score)");
  if (out.empty()) throw ParameterError("no data rows");
  return out;
}

MulticlassTable parse_multiclass(std::istream& in) {
  MulticlassTable table;
  std::size_t K = 0;
  const std::size_t columns = for_each_row(in, 3, [&](const auto& f, long row) {
    K = f.size() - 1;
    const long label = parse_int(f[0], row);
    if (label < 0 || label >= static_cast<long>(K)) {
      row_error(row, "label " + f[0] + " outside 0.." + std::to_string(K - 1));
    }
    std::vector<double> p(K);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = parse_real(f[k + 1], row);
      if (p[k] < 0.0 || p[k] > 1.0) row_error(row, "probability outside [0,1]");
      total += p[k];
    }
    if (std::abs(total - 1.0) > 1e-6) row_error(row, "probabilities sum to " + round_trip(total));
    table.labels.push_back(static_cast<int>(label));
    table.probs.push_back(std::move(p));
  });
  table.K = static_cast<int>(columns - 1);
  if (table.labels.empty()) throw ParameterError("no data rows");
  std::vector<int> counts(static_cast<std::size_t>(table.K), 0);
  for (int label : table.labels) ++counts[label];
  for (int k = 0; k < table.K; ++k) {
    if (counts[k] == 0) throw ParameterError("class " + std::to_string(k) + " has no rows");
  }
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- formatting

std::string fixed6(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
  if (ec != std::errc()) throw InternalError("fixed6: formatting failed");
  std::string out(buf, ptr);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string round_trip(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InternalError("round_trip: formatting failed");
  return std::string(buf, ptr);
}

std::string to_csv(const HPLBResult& r) {
  return "method,alpha,value\n" + std::string(to_string(r.method)) + "," + fixed6(r.alpha) + "," +
         fixed6(r.value) + "\n";
}

std::string to_csv(const PowerGridResult& r) {
  std::string out = "gamma,N,freq,mean_lambda\n";
  for (const auto& c : r.grid) {
    out += fixed6(c.gamma) + "," + std::to_string(c.N) + "," + fixed6(c.freq) + "," +
           fixed6(c.mean_lambda) + "\n";
  }
  return out;
}

std::string to_csv(const SplitScanResult& r) {
  std::string out = "s,m,n,value\n";
  for (std::size_t i = 0; i < r.splits.size(); ++i) {
    out += fixed6(r.splits[i]) + "," + std::to_string(r.m_n[i].first) + "," +
           std::to_string(r.m_n[i].second) + "," + fixed6(r.bounds[i].value) + "\n";
  }
  return out;
}

std::string matrix_to_csv(const std::vector<std::vector<double>>& matrix) {
  std::string out = "i,j,value\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix[i].size(); ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + fixed6(matrix[i][j]) + "\n";
    }
  }
  return out;
}

std::string dataset_to_csv(const LabeledScores& data) {
  std::string out = "score,label\n";
  const auto scores = data.scores();
  const auto labels = data.labels();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out += round_trip(scores[i]) + "," + (labels[i] ? "1" : "0") + "\n";
  }
  return out;
}

std::string ordered_to_csv(const std::vector<OrderedObservation>& data) {
  std::string out = "t,score\n";
  for (const auto& o : data) out += round_trip(o.t) + "," + round_trip(o.score) + "\n";
  return out;
}

std::string multiclass_to_csv(const MulticlassTable& table) {
  std::string out = "label";
  for (int k = 1; k <= table.K; ++k) out += ",p" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    out += std::to_string(table.labels[i]);
    for (int k = 0; k < table.K; ++k) out += "," + round_trip(table.probs[i][static_cast<std::size_t>(k)]);
    out += "\n";
  }
  return out;
}

std::string to_csv(const LevelRecord& r) {
  return "example,method,lambda,N,alpha,reps,freq\n" + std::string(to_string(r.example)) + "," +
         std::string(to_string(r.method)) + "," + fixed6(r.lambda) + "," + std::to_string(r.N) +
         "," + fixed6(r.alpha) + "," + std::to_string(r.reps) + "," + fixed6(r.freq) + "\n";
}

std::string to_csv(const SimulateRecord& r) {
  return "example,N,gamma,c,parameter,true_lambda\n" + std::string(to_string(r.example)) + "," +
         std::to_string(r.N) + "," + nan_or(r.gamma, fixed6) + "," + fixed6(r.c) + "," +
         round_trip(r.parameter) + "," + round_trip(r.true_lambda) + "\n";
}

// ---------------------------------------------------------------- JSON

std::string to_json(const HPLBResult& r) { return dump(hplb_json(r)); }

std::string to_json(const PowerGridResult& r) {
  json grid = json::array();
  for (const auto& c : r.grid) {
    grid.push_back({{"gamma", c.gamma}, {"N", c.N}, {"freq", c.freq}, {"mean_lambda", c.mean_lambda}});
  }
  json boundary = json::array();
  for (const auto& [N, g] : r.boundary) boundary.push_back({{"N", N}, {"gamma", g}});
  return dump({{"example", std::string(to_string(r.example))},
               {"method", std::string(to_string(r.method))},
               {"reps", r.reps},
               {"epsilon", r.epsilon},
               {"c", r.c},
               {"grid", grid},
               {"slope", real(r.slope)},
               {"boundary", boundary}});
}

PowerGridResult power_grid_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PowerGridResult r;
    r.example = example_from_string(j.at("example").get<std::string>());
    r.method = method_from_string(j.at("method").get<std::string>());
    r.reps = j.at("reps").get<int>();
    r.epsilon = j.at("epsilon").get<double>();
    r.c = j.at("c").get<double>();
    for (const auto& c : j.at("grid")) {
      r.grid.push_back({c.at("gamma").get<double>(), c.at("N").get<int>(), c.at("freq").get<double>(),
                        c.at("mean_lambda").get<double>()});
    }
    r.slope = real_of(j.at("slope"));
    for (const auto& b : j.at("boundary")) {
      r.boundary.emplace_back(b.at("N").get<int>(), b.at("gamma").get<double>());
    }
    return r;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed power grid JSON: ") + e.what());
  }
}

HPLBResult hplb_result_from_json(const std::string& text) {
  try {
    return hplb_of(json::parse(text));
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed result JSON: ") + e.what());
  }
}

std::string to_json(const SplitScanResult& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.splits.size(); ++i) {
    rows.push_back({{"s", r.splits[i]},
                    {"m", r.m_n[i].first},
                    {"n", r.m_n[i].second},
                    {"bound", hplb_json(r.bounds[i])}});
  }
  return dump({{"splits", rows}, {"warnings", r.warnings}});
}

std::string matrix_to_json(const std::vector<std::vector<double>>& matrix) {
  return dump({{"matrix", matrix}});
}

std::string to_json(const LevelRecord& r) {
  return dump({{"example", std::string(to_string(r.example))},
               {"method", std::string(to_string(r.method))},
               {"lambda", r.lambda},
               {"N", r.N},
               {"alpha", r.alpha},
               {"reps", r.reps},
               {"freq", r.freq}});
}

std::string to_json(const SimulateRecord& r) {
  return dump({{"example", std::string(to_string(r.example))},
               {"N", r.N},
               {"gamma", real(r.gamma)},
               {"c", r.c},
               {"parameter", r.parameter},
               {"true_lambda", r.true_lambda}});
}

}  // namespace hplb
