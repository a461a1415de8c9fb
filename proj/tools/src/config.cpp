#include "memchan_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#ifndef MEMCHAN_VERSION
#define MEMCHAN_VERSION "0.0.0"
#endif

namespace memchan::cli {
namespace {

using nlohmann::json;

template <typename T>
void read_if_present(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  if (steps == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < steps; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return out;
}

void SweepConfig::validate() const {
  if (lambda_values.empty()) throw UsageError("lambda_values is empty");
  if (n_values.empty()) throw UsageError("n_values is empty");
  for (double l : lambda_values) {
    if (!(l > 0.0 && l <= 1.0)) throw UsageError("lambda values must lie in (0, 1]; Gamma is undefined at 0");
  }
  for (int n : n_values) {
    if (n < 0) throw UsageError("n values must be >= 0");
  }
  if (tau_over_tau_e.steps < 1) throw UsageError("tau grid needs at least one step");
  if (!(tau_over_tau_e.start > 0.0) || !(tau_over_tau_e.stop >= tau_over_tau_e.start) ||
      !std::isfinite(tau_over_tau_e.stop)) {
    throw UsageError("tau grid must satisfy 0 < start <= stop");
  }
  if (!optimize_p && !(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0, 1]");
}

SweepConfig parse_sweep_config(const json& input) {
  if (!input.is_object()) throw UsageError("config must be a JSON object");
  const json& doc = input.contains("config") ? input.at("config") : input;
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  SweepConfig c;
  read_if_present(doc, "lambda_values", c.lambda_values);
  read_if_present(doc, "n_values", c.n_values);
  if (doc.contains("tau_over_tauE")) {
    const json& g = doc.at("tau_over_tauE");
    if (!g.is_object()) throw UsageError("tau_over_tauE must be an object {start, stop, steps}");
    read_if_present(g, "start", c.tau_over_tau_e.start);
    read_if_present(g, "stop", c.tau_over_tau_e.stop);
    read_if_present(g, "steps", c.tau_over_tau_e.steps);
  }
  read_if_present(doc, "optimize_p", c.optimize_p);
  read_if_present(doc, "p", c.p);
  read_if_present(doc, "output_path", c.output_path);
  if (doc.contains("format")) {
    std::string f;
    read_if_present(doc, "format", f);
    if (f == "csv") c.format = OutputFormat::kCsv;
    else if (f == "json") c.format = OutputFormat::kJson;
    else throw UsageError("format must be \"csv\" or \"json\"");
  }
  return c;
}

json to_json(const SweepConfig& c) {
  return json{{"lambda_values", c.lambda_values},
              {"n_values", c.n_values},
              {"tau_over_tauE",
               {{"start", c.tau_over_tau_e.start}, {"stop", c.tau_over_tau_e.stop}, {"steps", c.tau_over_tau_e.steps}}},
              {"optimize_p", c.optimize_p},
              {"p", c.p},
              {"output_path", c.output_path},
              {"format", c.format == OutputFormat::kCsv ? "csv" : "json"}};
}

json to_json(const RunRecord& record) {
  json rows = json::array();
  for (const auto& r : record.rows) {
    rows.push_back({{"lambda", rounded(r.lambda)},
                    {"n", r.n},
                    {"tau_over_tauE", rounded(r.tau_over_tau_e)},
                    {"p_star", rounded(r.p_star)},
                    {"gbar", rounded(r.gbar)},
                    {"g0", rounded(r.g0)},
                    {"gamma", rounded(r.gamma)},
                    {"rbar_q", rounded(r.rbar_q)},
                    {"r_q_s0", rounded(r.r_q_s0)}});
  }
  json doc{{"tool_version", record.tool_version}, {"config", to_json(record.config)}, {"rows", rows}};
  if (!record.timestamp.empty()) doc["timestamp"] = record.timestamp;
  return doc;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double rounded(double value) { return std::stod(format_number(value)); }

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string sweep_csv(const std::vector<GammaPoint>& rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\r\n";
  for (const auto& r : rows) {
    const std::vector<std::string> fields{format_number(r.lambda), std::to_string(r.n),
                                          format_number(r.tau_over_tau_e), format_number(r.p_star),
                                          format_number(r.gbar), format_number(r.g0),
                                          format_number(r.gamma), format_number(r.rbar_q),
                                          format_number(r.r_q_s0)};
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\r\n";
  }
  return out.str();
}

std::string tool_version() { return std::string("memchan ") + MEMCHAN_VERSION; }

}  // namespace memchan::cli
