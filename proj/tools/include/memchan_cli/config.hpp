#pragma once

// Sweep configuration, run records and their serialization.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "memchan/rates.hpp"

namespace memchan::cli {

/// Bad input from the user: maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kCsv, kJson };

/// `steps` evenly spaced points from start to stop inclusive.
struct Grid {
  double start = 0.02;
  double stop = 1.0;
  int steps = 50;

  std::vector<double> values() const;
};

/// Times are in units of tauE.
struct SweepConfig {
  std::vector<double> lambda_values{0.01};
  std::vector<int> n_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Grid tau_over_tau_e;
  bool optimize_p = true;
  /// B-carrier population used when optimize_p is false.
  double p = 1.0;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::kCsv;

  /// Throws UsageError for empty grids or out-of-range values.
  void validate() const;
};

/// Reads a config document; missing keys keep their defaults. A RunRecord
/// document is accepted too (its "config" member is used).
SweepConfig parse_sweep_config(const nlohmann::json& doc);
nlohmann::json to_json(const SweepConfig& config);

struct RunRecord {
  SweepConfig config;
  std::vector<GammaPoint> rows;
  std::string tool_version;
  std::string timestamp;  // empty unless requested
};

nlohmann::json to_json(const RunRecord& record);

/// 12 significant digits.
std::string format_number(double value);
/// `value` rounded to 12 significant digits.
double rounded(double value);

/// RFC-4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with embedded quotes doubled.
std::string csv_field(const std::string& field);

/// Fixed sweep CSV header.
inline constexpr const char* kSweepCsvHeader = "lambda,n,tau_over_tauE,p_star,gbar,g0,gamma,rbar_q,r_q_s0";

std::string sweep_csv(const std::vector<GammaPoint>& rows);

std::string tool_version();

}  // namespace memchan::cli
