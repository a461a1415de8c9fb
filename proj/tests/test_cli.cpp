#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "memchan_cli/app.hpp"
#include "memchan_cli/config.hpp"
#include "memchan_cli/sweep.hpp"
#include "memchan_cli/validate.hpp"
#include "oracles.hpp"

using namespace memchan;
using namespace memchan::cli;
using Catch::Matchers::WithinAbs;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "memchan");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find("\r\n", pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end == std::string::npos ? text.size() : end + 2;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "memchan_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("capacity subcommand examples", "[cli]") {
  auto r = call({"capacity", "--g", "1"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["Q"].get<double>() == 1.0);
  CHECK(doc["C"].get<double>() == 1.0);

  r = call({"capacity", "--lambda", "0.25"});
  REQUIRE(r.code == kExitOk);
  doc = json::parse(r.out);
  CHECK_THAT(doc["g"].get<double>(), WithinAbs(0.5, 1e-12));
  // 1 - H2(3/4)
  CHECK_THAT(doc["Q"].get<double>(), WithinAbs(1.0 - oracle::h2(0.75), 1e-11));
  CHECK_THAT(doc["Q"].get<double>(), WithinAbs(0.188722, 1e-6));
  CHECK(doc["C"].get<double>() == 1.0);

  r = call({"capacity", "--g", "0"});
  REQUIRE(r.code == kExitOk);
  doc = json::parse(r.out);
  CHECK(doc["Q"].get<double>() == 0.0);
  CHECK(doc["C"].get<double>() == 1.0);
}

TEST_CASE("capacity requires exactly one of g and lambda", "[cli]") {
  CHECK(call({"capacity"}).code == kExitUsage);
  const auto both = call({"capacity", "--g", "0.5", "--lambda", "0.25"});
  CHECK(both.code == kExitUsage);
  CHECK(both.err.find("exactly one") != std::string::npos);
  CHECK(call({"capacity", "--g", "1.5"}).code == kExitUsage);
}

TEST_CASE("usage errors and help", "[cli]") {
  CHECK(call({}).code == kExitUsage);
  CHECK(call({"bogus"}).code == kExitUsage);
  CHECK(call({"capacity", "--nope", "1"}).code == kExitUsage);
  CHECK(call({"--help"}).code == kExitOk);
  const auto v = call({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find(tool_version()) != std::string::npos);
}

TEST_CASE("sweep reproduces the strong-coupling maximum", "[cli][sweep]") {
  const auto r = call({"attenuation-sweep", "--lambda", "0.01", "--n", "1,5", "--tau-steps", "50", "--jobs", "4"});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 101);
  CHECK(r.out.rfind(std::string(kSweepCsvHeader) + "\r\n", 0) == 0);
  std::size_t best = 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 9);
    if (std::stod(rows[i][6]) > std::stod(rows[best][6])) best = i;
  }
  CHECK(rows[best][1] == "1");
  CHECK(std::abs(std::stod(rows[best][2]) - 0.5) < 0.15);
  CHECK(std::abs(std::stod(rows[best][6]) - 1.3) < 0.1);
}

TEST_CASE("sweep with n = 0 gives Gamma = 1 everywhere", "[cli][sweep]") {
  const auto r = call({"attenuation-sweep", "--lambda", "0.01,0.3,0.81", "--n", "0", "--tau-steps", "7"});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 22);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK_THAT(std::stod(rows[i][6]), WithinAbs(1.0, 1e-11));
}

TEST_CASE("weak coupling never gains", "[cli][sweep]") {
  const auto r = call({"attenuation-sweep", "--lambda", "0.81", "--n", "1,2,3,5,10", "--tau-steps", "20"});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 101);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][6]) <= 1.0 + 1e-9);
}

TEST_CASE("sweep output is byte-identical across runs and job counts", "[cli][sweep][property]") {
  // The output path is echoed in JSON records, so each pair shares a path.
  const auto csv = scratch("same.csv"), js = scratch("same.json");
  const std::vector<std::string> base{"attenuation-sweep", "--lambda", "0.01,0.2", "--n", "1,3", "--tau-steps", "9"};
  auto with = [&](std::vector<std::string> extra) {
    auto v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  REQUIRE(call(with({"--output", csv.string(), "--jobs", "1"})).code == kExitOk);
  const std::string first_csv = slurp(csv);
  REQUIRE(call(with({"--output", csv.string(), "--jobs", "5"})).code == kExitOk);
  CHECK(slurp(csv) == first_csv);
  REQUIRE(call(with({"--output", js.string(), "--format", "json"})).code == kExitOk);
  const std::string first_json = slurp(js);
  REQUIRE(call(with({"--output", js.string(), "--format", "json", "--jobs", "3"})).code == kExitOk);
  CHECK(slurp(js) == first_json);
  CHECK_FALSE(json::parse(first_json).contains("timestamp"));
}

TEST_CASE("JSON output round-trips through the config parser", "[cli][sweep]") {
  const auto path = scratch("round.json");
  REQUIRE(call({"attenuation-sweep", "--lambda", "0.04", "--n", "2", "--tau-start", "0.1", "--tau-stop", "0.9",
                "--tau-steps", "3", "--p", "0.25", "--format", "json", "--output", path.string(), "--timestamp"})
              .code == kExitOk);
  const json record = json::parse(slurp(path));
  CHECK(record["tool_version"] == tool_version());
  CHECK(record.contains("timestamp"));
  CHECK(record["rows"].size() == 3);
  const SweepConfig parsed = parse_sweep_config(record);
  CHECK(to_json(parsed) == record["config"]);
  CHECK_FALSE(parsed.optimize_p);
  CHECK(parsed.p == 0.25);
  CHECK(parsed.format == OutputFormat::kJson);

  // Feeding the record back reproduces the rows; --output is overridden.
  const auto again = scratch("again.json");
  REQUIRE(call({"attenuation-sweep", "--config", path.string(), "--output", again.string()}).code == kExitOk);
  CHECK(json::parse(slurp(again))["rows"] == record["rows"]);
}

TEST_CASE("flags override config fields", "[cli][sweep]") {
  const auto cfg = scratch("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"lambda_values": [0.5], "n_values": [4], "tau_over_tauE": {"start": 0.2, "stop": 0.4, "steps": 2}})";
  }
  auto r = call({"attenuation-sweep", "--config", cfg.string()});
  REQUIRE(r.code == kExitOk);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "0.5");
  CHECK(rows[1][1] == "4");
  r = call({"attenuation-sweep", "--config", cfg.string(), "--n", "2", "--tau-steps", "4"});
  REQUIRE(r.code == kExitOk);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][1] == "2");
}

TEST_CASE("fixed p sweep row matches the core", "[cli][sweep]") {
  SweepConfig c;
  c.lambda_values = {0.09};
  c.n_values = {3};
  c.tau_over_tau_e = {0.3, 0.3, 1};
  c.optimize_p = false;
  c.p = 0.4;
  const auto rows = run_sweep(c, 1);
  REQUIRE(rows.size() == 1);
  const double gbar = attenuated_gbar(AttenuationProtocol{3, 0.3, 0.4, 0.09, 1.0});
  CHECK_THAT(rows[0].gbar, WithinAbs(gbar, 1e-15));
  const double q = 1.0 - oracle::h2(0.5 + 0.5 * gbar);
  const double q0 = 1.0 - oracle::h2(0.5 + 0.5 * 0.3);
  CHECK_THAT(rows[0].gamma, WithinAbs(q / ((3 * 0.3 + 1.0) * q0), 1e-12));
  CHECK_THAT(rows[0].rbar_q, WithinAbs(q / 1.9, 1e-12));
}

TEST_CASE("invalid sweep configurations are usage errors", "[cli][sweep]") {
  CHECK(call({"attenuation-sweep", "--tau-steps", "0"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--tau-start", "-0.1"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--lambda", "0"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--n", "-1"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--format", "xml"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--jobs", "0"}).code == kExitUsage);
  CHECK(call({"attenuation-sweep", "--n", "1", "--tau-steps", "2", "--output", "/nonexistent/dir/out.csv"}).code ==
        kExitUsage);
  CHECK_THROWS_AS(parse_sweep_config(json::parse(R"({"lambda_values": "x"})")), UsageError);
  CHECK_THROWS_AS(parse_sweep_config(json::parse("[1, 2]")), UsageError);
}

TEST_CASE("csv quoting and number formatting", "[cli]") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2.0) == "2");
  CHECK(rounded(0.1234567890123456) == 0.123456789012);
  CHECK(Grid{0.0, 1.0, 5}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("rates subcommand examples", "[cli][rates]") {
  auto r = call({"rates", "--tau-s", "1", "--tau-e", "inf"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["regime"] == "perfect");
  CHECK(doc["r_q"].get<double>() == 1.0);
  CHECK(doc["r_c"].get<double>() == 1.0);

  r = call({"rates", "--tau-s", "1", "--lambda", "0.25"});
  REQUIRE(r.code == kExitOk);
  doc = json::parse(r.out);
  CHECK(doc["regime"] == "memoryless");
  CHECK_THAT(doc["r_q"].get<double>(), WithinAbs(0.188722, 1e-6));
  CHECK(doc["r_c"].get<double>() == 1.0);

  r = call({"rates", "--regime", "attenuation", "--lambda", "0.01", "--n", "1", "--tau", "0.5"});
  REQUIRE(r.code == kExitOk);
  doc = json::parse(r.out);
  CHECK(doc["regime"] == "attenuation");
  CHECK_THAT(doc["r_c"].get<double>(), WithinAbs(1.0 / 1.5, 1e-11));
}

TEST_CASE("rates on irregular memoryless patterns report an interval", "[cli][rates]") {
  const auto r = call({"rates", "--pattern", "1,2,1,3,1.5", "--lambda", "0.25"});
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  REQUIRE(doc.contains("r_q_interval"));
  CHECK(doc["r_q_interval"][0].get<double>() <= doc["r_q_interval"][1].get<double>());
  CHECK(doc["r_c_interval"][1].get<double>() <= 1.0 + 1e-12);
}

TEST_CASE("rates rejects inconsistent specs", "[cli][rates]") {
  CHECK(call({"rates"}).code == kExitUsage);
  CHECK(call({"rates", "--tau-s", "0.5"}).code == kExitUsage);  // neither relaxed nor perfect
  CHECK(call({"rates", "--tau-s", "1", "--pattern", "1,1"}).code == kExitUsage);
  CHECK(call({"rates", "--regime", "memoryless", "--tau-s", "0.5"}).code == kExitUsage);
  CHECK(call({"rates", "--regime", "grouped", "--tau-e", "inf"}).code == kExitUsage);
  CHECK(call({"rates", "--tau-s", "-1"}).code == kExitUsage);
  CHECK(call({"rates", "--regime", "best", "--tau-min", "0"}).code == kExitUsage);
}

TEST_CASE("rates grouped and best regimes", "[cli][rates]") {
  auto r = call({"rates", "--regime", "grouped", "--group-size", "3", "--tau", "0.1", "--lambda", "0.25"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["config"]["group_size"] == 3);
  CHECK(doc["r_q"].get<double>() <= doc["r_c"].get<double>() + 1e-12);
  CHECK(doc["r_c"].get<double>() <= doc["upper_bound"].get<double>() + 1e-12);

  r = call({"rates", "--regime", "best", "--tau-min", "1", "--lambda", "0.25", "--budget", "2"});
  REQUIRE(r.code == kExitOk);
  doc = json::parse(r.out);
  CHECK_THAT(doc["r_q"].get<double>(), WithinAbs(1.0 - oracle::h2(0.75), 1e-9));
  CHECK_THAT(doc["r_c"].get<double>(), WithinAbs(1.0, 1e-9));
}

TEST_CASE("markov-check passes and is seed-deterministic", "[cli]") {
  const auto a = call({"markov-check", "--samples", "5", "--seed", "7"});
  const auto b = call({"markov-check", "--samples", "5", "--seed", "7"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("PASS", 0) == 0);
  CHECK(call({"markov-check", "--relaxation", "dephasing", "--n", "2"}).code == kExitOk);
  CHECK(call({"markov-check", "--n", "0"}).code == kExitUsage);
}

TEST_CASE("validate passes on a fresh build and is deterministic", "[cli][validate]") {
  const auto a = call({"validate"});
  const auto b = call({"validate"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("FAIL") == std::string::npos);
  for (const auto& r : run_validation()) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("validate names the stationarity check under an injected fault", "[cli][validate]") {
  const auto r = call({"validate", "--fault-eta", "1.5"});
  CHECK(r.code == kExitValidationFailure);
  CHECK(r.out.find("FAIL stationarity") != std::string::npos);
  ValidateOptions bad;
  bad.fault_eta = 2.0;
  bool stationarity_failed = false;
  for (const auto& c : run_validation(bad)) stationarity_failed |= c.name == "stationarity" && !c.passed;
  CHECK(stationarity_failed);
}

TEST_CASE("installed binary maps outcomes to exit codes", "[cli][process]") {
  const std::string tool = MEMCHAN_TOOL_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("capacity --g 1") == 0);
  CHECK(status("validate --fault-eta 1.5") == 1);
  CHECK(status("capacity") == 2);
  CHECK(status("no-such-command") == 2);
}
