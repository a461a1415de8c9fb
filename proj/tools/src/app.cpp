#include "memchan_cli/app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "memchan/attenuation.hpp"
#include "memchan/markov.hpp"
#include "memchan/rates.hpp"
#include "memchan_cli/config.hpp"
#include "memchan_cli/sweep.hpp"
#include "memchan_cli/validate.hpp"

namespace memchan::cli {
namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

double parse_time(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + " expects a number or 'inf'");
  }
  if (used != text.size() || std::isnan(v)) throw UsageError(std::string(flag) + " expects a number or 'inf'");
  return v;
}

json report_json(const RateReport& r) {
  return json{{"regime", regime_name(r.regime)},
              {"r_q", rounded(r.r_q)},
              {"r_c", rounded(r.r_c)},
              {"upper_bound", rounded(r.upper_bound)},
              {"config",
               {{"group_size", r.config.group_size},
                {"b_carriers", r.config.b_carriers},
                {"tau", rounded(r.config.tau)},
                {"p", rounded(r.config.p)}}}};
}

// ---- capacity ----

struct CapacityArgs {
  std::optional<double> g;
  std::optional<double> lambda;
};

int cmd_capacity(const CapacityArgs& a, std::ostream& out) {
  if (a.g.has_value() == a.lambda.has_value()) throw UsageError("give exactly one of --g or --lambda");
  double g = 0.0;
  if (a.lambda) {
    if (!(*a.lambda >= 0.0 && *a.lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
    g = std::sqrt(*a.lambda);
  } else {
    g = *a.g;
  }
  json doc{{"g", rounded(g)},
           {"Q", rounded(dephasing_quantum_capacity(g))},
           {"C", rounded(dephasing_classical_capacity(g))}};
  if (a.lambda) doc["lambda"] = rounded(*a.lambda);
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ---- attenuation-sweep ----

struct SweepArgs {
  std::string config_path;
  std::vector<double> lambdas;
  std::vector<int> ns;
  std::optional<double> tau_start, tau_stop;
  std::optional<int> tau_steps;
  std::optional<double> p;
  std::optional<bool> optimize_p;
  std::optional<std::string> output, format;
  int jobs = 1;
  bool timestamp = false;
};

SweepConfig sweep_config_from(const SweepArgs& a) {
  SweepConfig c;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw UsageError("cannot read config file " + a.config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    c = parse_sweep_config(doc);
  }
  if (!a.lambdas.empty()) c.lambda_values = a.lambdas;
  if (!a.ns.empty()) c.n_values = a.ns;
  if (a.tau_start) c.tau_over_tau_e.start = *a.tau_start;
  if (a.tau_stop) c.tau_over_tau_e.stop = *a.tau_stop;
  if (a.tau_steps) c.tau_over_tau_e.steps = *a.tau_steps;
  if (a.p) {
    c.p = *a.p;
    c.optimize_p = false;
  }
  if (a.optimize_p) c.optimize_p = *a.optimize_p;
  if (a.output) c.output_path = *a.output;
  if (a.format) c.format = *a.format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  c.validate();
  return c;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const SweepConfig config = sweep_config_from(a);
  if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
  RunRecord record{config, run_sweep(config, a.jobs), tool_version(), a.timestamp ? utc_timestamp() : ""};
  const std::string body =
      config.format == OutputFormat::kCsv ? sweep_csv(record.rows) : to_json(record).dump(2) + "\n";
  if (config.output_path.empty()) {
    out << body;
    return kExitOk;
  }
  std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write " + config.output_path);
  file << body;
  file.close();
  if (!file) throw UsageError("failed writing " + config.output_path);
  return kExitOk;
}

// ---- rates ----

struct RatesArgs {
  std::string regime = "auto";
  double lambda = 0.25;
  std::string tau_e = "1";
  std::optional<double> tau_s;
  std::vector<double> pattern;
  bool periodic = false;
  int group_size = 2;
  int n = 1;
  double tau = 0.5;
  std::optional<double> p;
  double tau_min = 0.0;
  int budget = 10;
  int max_group = 10000;
};

int cmd_rates(const RatesArgs& a, std::ostream& out) {
  if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
  const double tau_e = parse_time(a.tau_e, "--tau-e");
  if (!(tau_e > 0.0)) throw UsageError("--tau-e must be positive");
  const bool infinite_memory = std::isinf(tau_e);

  std::optional<CarrierSequence> seq;
  if (a.tau_s && !a.pattern.empty()) throw UsageError("give either --tau-s or --pattern, not both");
  if (a.tau_s) seq = CarrierSequence{{*a.tau_s}, true};
  if (!a.pattern.empty()) seq = CarrierSequence{a.pattern, a.periodic};
  if (seq) seq->validate();

  std::string regime = a.regime;
  if (regime == "auto") {
    if (!seq) throw UsageError("auto regime needs --tau-s or --pattern");
    bool all_zero = true, all_relaxed = true;
    for (double t : seq->pattern) {
      all_zero = all_zero && t == 0.0;
      all_relaxed = all_relaxed && t >= tau_e;
    }
    if (infinite_memory || all_zero) regime = "perfect";
    else if (all_relaxed) regime = "memoryless";
    else throw UsageError("sequence mixes relaxed and unrelaxed spacings; choose --regime grouped|attenuation|best");
  }

  if (infinite_memory && regime != "perfect") throw UsageError("--tau-e inf only describes the perfect regime");

  json doc;
  if (regime == "perfect" || regime == "memoryless") {
    if (!seq) throw UsageError(regime + " regime needs --tau-s or --pattern");
    const SequenceStats stats = sequence_stats(*seq);
    RateReport unit;
    if (regime == "perfect") {
      unit = perfect_memory_rates(2, 1.0);
    } else {
      for (double t : seq->pattern) {
        if (t < tau_e) throw UsageError("memoryless regime needs every spacing >= tauE");
      }
      unit = memoryless_rates(qubit_dephasing_environment(a.lambda, tau_e), tau_e);
      unit.r_q *= tau_e;  // back to capacities per use
      unit.r_c *= tau_e;
    }
    if (stats.regular && stats.tau_s) {
      const double ts = *stats.tau_s;
      RateReport r = regime == "perfect" ? perfect_memory_rates(2, ts)
                                         : RateReport{rate_regular(unit.r_q, ts), rate_regular(unit.r_c, ts),
                                                      RateRegime::kMemoryless, 1.0 / ts, {}};
      r.config.tau = ts;
      doc = report_json(r);
    } else {
      const auto q = rate_interval(unit.r_q, stats);
      const auto c = rate_interval(unit.r_c, stats);
      doc = json{{"regime", regime},
                 {"r_q_interval", {rounded(q.lower), rounded(q.upper)}},
                 {"r_c_interval", {rounded(c.lower), rounded(c.upper)}},
                 {"tau_prime", rounded(stats.tau_prime)},
                 {"tau_double_prime", rounded(stats.tau_double_prime)}};
    }
  } else if (regime == "grouped") {
    if (a.group_size < 1) throw UsageError("--group-size must be >= 1");
    doc = report_json(grouped_rates(qubit_dephasing_environment(a.lambda, tau_e), a.group_size, a.tau));
  } else if (regime == "attenuation") {
    AttenuationProtocol proto{a.n, a.tau, 1.0, a.lambda, tau_e};
    if (a.p) {
      proto.p = *a.p;
    } else {
      proto.p = optimize_gbar(a.lambda, a.n, a.tau, tau_e).p;
    }
    proto.validate();
    doc = report_json(rate_attenuation(proto));
  } else if (regime == "best") {
    if (!(a.tau_min > 0.0)) throw UsageError("--tau-min must be positive");
    if (a.budget < 1) throw UsageError("--budget must be >= 1");
    RateSearchOptions options;
    options.max_group = a.max_group;
    doc = report_json(best_rate_search(a.tau_min, qubit_dephasing_environment(a.lambda, tau_e), a.budget, options));
  } else {
    throw UsageError("unknown regime " + regime);
  }
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ---- markov-check ----

struct MarkovArgs {
  double lambda = 0.3;
  std::string relaxation = "rotating";
  int n = 3;
  int samples = 10;
  std::uint64_t seed = 1;
};

int cmd_markov(const MarkovArgs& a, std::ostream& out) {
  if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
  if (a.n < 1 || a.n > 6) throw UsageError("--n must lie in [1, 6]");
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  DecoherentEnvironment denv{2, qubit_control_coupling(a.lambda),
                             a.relaxation == "dephasing" ? dephasing_decoherent_relaxation(2)
                                                         : rotating_decoherent_relaxation()};
  const auto env = denv.to_environment();
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> spacing(0.0, 1.5);
  double worst = 0.0;
  for (int i = 0; i < a.samples; ++i) {
    CarrierSequence s;
    for (int j = 0; j + 1 < a.n; ++j) s.pattern.push_back(spacing(rng));
    const DensityOperator r = random_density(Index{1} << a.n, rng);
    const auto decomp = markov_decompose(denv, s, a.n);
    const ComplexMatrix direct = compose_sequence(env, s, a.n).apply(r.matrix());
    worst = std::max(worst, trace_distance(markov_reconstruct(decomp, r).matrix(), direct));
  }
  const bool ok = worst < 1e-10;
  out << (ok ? "PASS" : "FAIL") << " markov-reconstruction samples=" << a.samples << " n=" << a.n
      << " max_trace_distance=" << format_number(worst) << "\n";
  return ok ? kExitOk : kExitValidationFailure;
}

// ---- validate ----

int cmd_validate(std::optional<double> fault_eta, std::ostream& out) {
  ValidateOptions options;
  options.fault_eta = fault_eta;
  const auto results = run_validation(options);
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  if (failed == 0) {
    out << "all " << results.size() << " checks passed\n";
    return kExitOk;
  }
  out << failed << " of " << results.size() << " checks failed:";
  for (const auto& r : results) {
    if (!r.passed) out << " " << r.name;
  }
  out << "\n";
  return kExitValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlated-noise quantum channel toolkit"};
  app.name(args.empty() ? "memchan" : args.front());
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  CapacityArgs cap;
  auto* c_cap = app.add_subcommand("capacity", "Q and C of the phase damping channel P_g");
  c_cap->add_option("--g", cap.g, "dephasing factor g in [-1, 1]");
  c_cap->add_option("--lambda", cap.lambda, "coupling; g = sqrt(lambda)");

  SweepArgs sw;
  std::string optimize_flag;
  auto* c_sweep = app.add_subcommand("attenuation-sweep", "Gamma sweep over (lambda, n, tau/tauE); flags override --config");
  c_sweep->add_option("--config", sw.config_path, "JSON config document")->check(CLI::ExistingFile);
  c_sweep->add_option("--lambda", sw.lambdas, "lambda values")->delimiter(',');
  c_sweep->add_option("--n", sw.ns, "B-carrier counts")->delimiter(',');
  c_sweep->add_option("--tau-start", sw.tau_start, "first tau/tauE");
  c_sweep->add_option("--tau-stop", sw.tau_stop, "last tau/tauE");
  c_sweep->add_option("--tau-steps", sw.tau_steps, "number of tau points");
  c_sweep->add_option("--p", sw.p, "fixed B-carrier population (disables optimization)");
  c_sweep->add_option("--optimize-p", optimize_flag, "true|false")->check(CLI::IsMember({"true", "false"}));
  c_sweep->add_option("--output", sw.output, "output file (default: stdout)");
  c_sweep->add_option("--format", sw.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  c_sweep->add_option("--jobs", sw.jobs, "worker threads");
  c_sweep->add_flag("--timestamp", sw.timestamp, "record the wall-clock time in JSON output");

  RatesArgs ra;
  auto* c_rates = app.add_subcommand("rates", "transmission rates of a carrier sequence");
  c_rates->add_option("--regime", ra.regime, "auto|memoryless|perfect|grouped|attenuation|best")
      ->check(CLI::IsMember({"auto", "memoryless", "perfect", "grouped", "attenuation", "best"}));
  c_rates->add_option("--lambda", ra.lambda, "coupling lambda");
  c_rates->add_option("--tau-e", ra.tau_e, "LE relaxation time (number or inf)");
  c_rates->add_option("--tau-s", ra.tau_s, "regular carrier spacing");
  c_rates->add_option("--pattern", ra.pattern, "carrier spacings")->delimiter(',');
  c_rates->add_flag("--periodic", ra.periodic, "repeat --pattern");
  c_rates->add_option("--group-size", ra.group_size, "carriers per group");
  c_rates->add_option("--n", ra.n, "B carriers per A carrier");
  c_rates->add_option("--tau", ra.tau, "intra-group or B-carrier spacing");
  c_rates->add_option("--p", ra.p, "B-carrier population (default: optimized)");
  c_rates->add_option("--tau-min", ra.tau_min, "minimum spacing for --regime best");
  c_rates->add_option("--budget", ra.budget, "largest n for --regime best");
  c_rates->add_option("--max-group", ra.max_group, "largest group for --regime best");

  MarkovArgs mk;
  auto* c_markov = app.add_subcommand("markov-check", "Markov reconstruction against direct composition");
  c_markov->add_option("--lambda", mk.lambda, "coupling lambda");
  c_markov->add_option("--relaxation", mk.relaxation, "rotating|dephasing")
      ->check(CLI::IsMember({"rotating", "dephasing"}));
  c_markov->add_option("--n", mk.n, "carriers");
  c_markov->add_option("--samples", mk.samples, "random instances");
  c_markov->add_option("--seed", mk.seed, "RNG seed");

  std::optional<double> fault_eta;
  auto* c_validate = app.add_subcommand("validate", "structural invariant suite");
  c_validate->add_option("--fault-eta", fault_eta, "negative control: constant eta for the test environment");

  std::vector<std::string> storage(args);
  if (storage.empty()) storage.emplace_back("memchan");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_cap->parsed()) return cmd_capacity(cap, out);
    if (c_sweep->parsed()) {
      if (!optimize_flag.empty()) sw.optimize_p = optimize_flag == "true";
      return cmd_sweep(sw, out);
    }
    if (c_rates->parsed()) return cmd_rates(ra, out);
    if (c_markov->parsed()) return cmd_markov(mk, out);
    if (c_validate->parsed()) return cmd_validate(fault_eta, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace memchan::cli
