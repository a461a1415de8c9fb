// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures (capped at 1).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memchan/attenuation.hpp"
#include "memchan/channels.hpp"
#include "memchan/markov.hpp"
#include "memchan/rates.hpp"
#include "oracles.hpp"

#ifdef MEMCHAN_HAVE_CLI
#include "memchan_cli/validate.hpp"
#endif

using namespace memchan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
  std::fflush(stdout);
}

std::string str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// The grid of criteria 1 and 6: 50 points on (0, 1].
std::vector<double> tau_grid() {
  std::vector<double> t;
  for (int i = 1; i <= 50; ++i) t.push_back(i / 50.0);
  return t;
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  GammaPoint best;
  best.gamma = -1.0;
  for (int n = 1; n <= 10; ++n) {
    for (double tau : tau_grid()) {
      const GammaPoint pt = gamma_point(0.01, n, tau);
      if (pt.gamma > best.gamma) best = pt;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = best.gamma >= 1.2 && best.gamma <= 1.4 && best.n == 1 && best.tau_over_tau_e >= 0.35 &&
                  best.tau_over_tau_e <= 0.65 && secs < 60.0;
  return {ok, "max Gamma " + str(best.gamma) + " at n=" + std::to_string(best.n) + ", tau/tauE=" +
                  str(best.tau_over_tau_e) + "; want [1.2, 1.4], n=1, tau in [0.35, 0.65]; " + str(secs) +
                  " s (< 60)"};
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, 50);
  double worst = 0.0;
  int skipped = 0;
  for (int i = 0; i < 100; ++i) {
    const double p = unit(rng), lambda = unit(rng), eta = unit(rng);
    const int n = count(rng);
    const auto sol = closed_form_solution(p, lambda, eta, n);
    if (!sol) {
      ++skipped;
      continue;
    }
    // Reference: the scalar recursion of the oracle, independent of the
    // channel-level iteration used by the library.
    const double direct = oracle::scalar_gbar(p, lambda, eta, n);
    worst = std::max({worst, std::abs(sol->gbar - direct), std::abs(sol->gbar - iterated_gbar(p, lambda, eta, n))});
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && skipped == 0 && secs < 5.0,
          "max |closed - iterated| " + str(worst) + " (< 1e-9) over 100 points, " + std::to_string(skipped) +
              " without closed form; " + str(secs) + " s (< 5)"};
}

Verdict criterion3() {
  double worst_q = 0.0, worst_c = 0.0;
  for (double g : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
    const auto channel = phase_damping(g);
    const double exact = 1.0 - oracle::h2(0.5 + 0.5 * g);
    worst_q = std::max(worst_q, std::abs(one_shot_q_lower(channel) - exact));
    worst_c = std::max(worst_c, std::abs(holevo_information(channel, computational_basis_ensemble(2)) - 1.0));
  }
  return {worst_q <= 1e-4 && worst_c <= 1e-12,
          "max |Q_1shot - (1 - H2)| " + str(worst_q) + " (<= 1e-4); max |chi - 1| " + str(worst_c)};
}

Verdict criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double lambda = unit(rng);
    const auto env = qubit_dephasing_environment(lambda);
    const auto n = memoryless_map(env);
    worst = std::max(worst, choi_distance(compose_sequence(env, CarrierSequence{{1.0 + unit(rng)}, false}, 2),
                                          tensor(n, n)));
    const double intra = 0.5 * unit(rng);
    const std::array<double, 1> group{intra};
    const auto g = grouped_map(env, group);
    const CarrierSequence two_groups{{intra, 1.0 + unit(rng), intra}, false};
    worst = std::max(worst, choi_distance(compose_sequence(env, two_groups, 4), tensor(g, g)));
  }
  return {worst < 1e-10, "max Choi distance " + str(worst) + " (< 1e-10) at 5 random lambda"};
}

Verdict criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double lambda = unit(rng);
    const DecoherentEnvironment denv{2, qubit_control_coupling(lambda),
                                     i % 2 ? rotating_decoherent_relaxation() : dephasing_decoherent_relaxation(2)};
    const int n = count(rng);
    CarrierSequence s;
    for (int j = 0; j + 1 < n; ++j) s.pattern.push_back(1.5 * unit(rng));
    const DensityOperator r = random_density(Index{1} << n, rng);
    const auto decomp = markov_decompose(denv, s, n);
    const ComplexMatrix direct = compose_sequence(denv.to_environment(), s, n).apply(r.matrix());
    worst = std::max(worst, trace_distance(markov_reconstruct(decomp, r).matrix(), direct));
  }
  return {worst < 1e-10, "max trace distance " + str(worst) + " (< 1e-10) on 50 instances"};
}

Verdict criterion6() {
  int violations = 0;
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    for (double tau : tau_grid()) {
      const double p = optimize_gbar(0.01, n, tau).p;
      const RateReport r = rate_attenuation(AttenuationProtocol{n, tau, p, 0.01, 1.0});
      worst = std::max(worst, r.r_c);
      if (!(r.r_c <= 1.0)) ++violations;
    }
  }
  return {violations == 0, "max r_c " + str(worst) + " over 500 grid points, " + std::to_string(violations) +
                               " above 1/tauE"};
}

Verdict criterion7() {
  const double lambda = 0.25;
  const auto env = qubit_dephasing_environment(lambda);
  const double q = 1.0 - oracle::h2(0.5 + 0.5 * std::sqrt(lambda));
  const RateReport relaxed = best_rate_search(1.0, env, 10);
  const bool ok_relaxed = std::abs(relaxed.r_q - q) < 1e-9 && std::abs(relaxed.r_c - 1.0) < 1e-9;

  const auto t0 = Clock::now();
  const RateReport fast = best_rate_search(0.01, env, 10);
  const double secs = seconds_since(t0);
  const double target = 0.9 * fast.upper_bound;
  const bool ok_fast = fast.r_q >= target && fast.config.group_size >= 10 && fast.r_q <= fast.upper_bound;
  std::ostringstream d;
  d << "tau_min=tauE: r_q " << str(relaxed.r_q) << " vs Q(N) " << str(q) << ", r_c " << str(relaxed.r_c)
    << " vs 1; tau_min=0.01: r_q " << str(fast.r_q) << " (>= " << str(target) << "), m=" << fast.config.group_size
    << " (" << regime_name(fast.regime) << "), bound " << str(fast.upper_bound) << ", " << str(secs) << " s";
  return {ok_relaxed && ok_fast, d.str()};
}

Verdict criterion8() {
#ifdef MEMCHAN_HAVE_CLI
  const auto results = cli::run_validation();
  std::string failed;
  for (const auto& r : results) {
    if (!r.passed) failed += " " + r.name + "(" + r.detail + ")";
  }
  return {failed.empty(), failed.empty() ? std::to_string(results.size()) + " checks passed" : "failed:" + failed};
#else
  return {false, "built without the CLI; validate suite unavailable"};
#endif
}

}  // namespace

int main() {
  report(1, "Gamma maximum", criterion1);
  report(2, "closed form vs iteration", criterion2);
  report(3, "capacity consistency", criterion3);
  report(4, "factorization", criterion4);
  report(5, "Markov reconstruction", criterion5);
  report(6, "classical no-gain", criterion6);
  report(7, "asymptotic rates", criterion7);
  report(8, "structural suite", criterion8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
