#include "memchan_cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace memchan::cli {

GammaPoint sweep_point(const SweepConfig& config, double lambda, int n, double tau_over_tau_e) {
  if (config.optimize_p) return gamma_point(lambda, n, tau_over_tau_e, 1.0);

  const AttenuationProtocol proto{n, tau_over_tau_e, config.p, lambda, 1.0};
  GammaPoint pt;
  pt.lambda = lambda;
  pt.n = n;
  pt.tau_over_tau_e = tau_over_tau_e;
  pt.p_star = config.p;
  pt.gbar = attenuated_gbar(proto);
  pt.g0 = std::sqrt(lambda);
  const double q0 = dephasing_quantum_capacity(pt.g0);
  const double period = n * tau_over_tau_e + 1.0;
  const double q = dephasing_quantum_capacity(pt.gbar);
  pt.gamma = q / (period * q0);
  pt.rbar_q = q / period;
  pt.r_q_s0 = q0;
  return pt;
}

std::vector<GammaPoint> run_sweep(const SweepConfig& config, int jobs) {
  config.validate();
  struct Task {
    double lambda;
    int n;
    double tau;
  };
  std::vector<Task> tasks;
  const auto taus = config.tau_over_tau_e.values();
  for (double lambda : config.lambda_values)
    for (int n : config.n_values)
      for (double tau : taus) tasks.push_back({lambda, n, tau});

  std::vector<GammaPoint> rows(tasks.size());
  const int workers = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = sweep_point(config, tasks[i].lambda, tasks[i].n, tasks[i].tau);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          rows[i] = sweep_point(config, tasks[i].lambda, tasks[i].n, tasks[i].tau);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace memchan::cli
