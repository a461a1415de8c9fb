#include "memchan/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace memchan {
namespace {

double checked_g(double g) {
  if (!std::isfinite(g) || std::abs(g) > 1.0 + 1e-12) {
    throw std::domain_error("phase damping factor must satisfy |g| <= 1");
  }
  return std::min(std::abs(g), 1.0);
}

double entropy_of(const ComplexMatrix& m) { return entropy_of_spectrum(hermitian_eigenvalues(m)); }

Index power(Index base, int exponent) {
  Index out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

// Largest group for which the exact grouped map fits the Choi budget.
int exact_group_limit(Index carrier_dim) {
  int m = 0;
  while (power(carrier_dim, 2 * (m + 1)) <= kMaxChoiDimension) ++m;
  return m;
}

double period_of(int m, double tau, double tau_e) {
  return static_cast<double>(m - 1) * tau + std::max(tau, tau_e);
}

ComplexMatrix bloch_density(const std::array<double, 3>& r) {
  ComplexMatrix rho(2, 2);
  rho << Complex(0.5 * (1.0 + r[2]), 0.0), Complex(0.5 * r[0], -0.5 * r[1]),
      Complex(0.5 * r[0], 0.5 * r[1]), Complex(0.5 * (1.0 - r[2]), 0.0);
  return rho;
}

std::array<double, 3> into_ball(std::array<double, 3> r) {
  const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (norm > 1.0) {
    for (double& c : r) c /= norm;
  }
  return r;
}

// Replaces `best` when `value` is larger beyond rounding noise.
bool improves(double value, double best) { return value > best + 1e-12 * std::max(1.0, std::abs(best)); }

}  // namespace

SequenceStats sequence_stats(const CarrierSequence& s) {
  s.validate();
  if (s.pattern.empty()) throw std::domain_error("sequence pattern is empty");
  SequenceStats stats;
  if (s.periodic) {
    const double mean = std::accumulate(s.pattern.begin(), s.pattern.end(), 0.0) /
                        static_cast<double>(s.pattern.size());
    stats.tau_prime = stats.tau_double_prime = mean;
  } else {
    const std::size_t n = s.pattern.size();
    const std::size_t first = std::max<std::size_t>(1, (n + 1) / 2);
    double t = 0.0;
    stats.tau_prime = std::numeric_limits<double>::infinity();
    stats.tau_double_prime = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n; ++k) {
      t += s.pattern[k - 1];
      if (k < first) continue;
      const double avg = t / static_cast<double>(k);
      stats.tau_prime = std::min(stats.tau_prime, avg);
      stats.tau_double_prime = std::max(stats.tau_double_prime, avg);
    }
  }
  stats.regular = std::abs(stats.tau_double_prime - stats.tau_prime) <= 1e-12;
  if (stats.regular) stats.tau_s = stats.tau_prime;
  return stats;
}

std::size_t count_carriers(const CarrierSequence& s, double t) {
  s.validate();
  if (t <= 0.0) return 0;
  if (s.periodic && std::all_of(s.pattern.begin(), s.pattern.end(), [](double x) { return x == 0.0; })) {
    throw std::domain_error("zero-length periodic pattern packs infinitely many carriers");
  }
  const std::size_t limit =
      s.periodic ? std::numeric_limits<std::size_t>::max() : s.finite_carrier_count();
  std::size_t count = 0;
  double entry = 0.0;
  while (entry < t && count < limit) {
    ++count;
    if (count < limit) entry += s.interval(count - 1);
  }
  return count;
}

double dephasing_quantum_capacity(double g) {
  const double a = checked_g(g);
  return std::max(0.0, 1.0 - binary_entropy(0.5 + 0.5 * a));
}

double dephasing_classical_capacity(double g) {
  checked_g(g);
  return 1.0;
}

double coherent_information(const QuantumChannel& channel, const DensityOperator& rho) {
  if (rho.dim() != channel.dim_in()) throw DimensionMismatch("input state does not match the channel");
  if (channel.dim_in() * channel.dim_out() > kMaxChoiDimension) {
    throw BudgetExceeded("coherent information: joint output exceeds the dense budget");
  }
  return coherent_information(channel, purify(rho), rho.dim());
}

double coherent_information(const QuantumChannel& channel, const PureState& psi, Index reference_dim) {
  const Index din = channel.dim_in();
  const Index dout = channel.dim_out();
  if (reference_dim < 1 || psi.dim() != din * reference_dim) {
    throw DimensionMismatch("purification does not live on input (x) reference");
  }
  // Column r of `amp` is the system vector paired with reference index r.
  const Eigen::Map<const ComplexMatrix> amp_t(psi.amplitudes().data(), reference_dim, din);
  const ComplexMatrix amp = amp_t.transpose();

  ComplexMatrix joint = ComplexMatrix::Zero(dout * reference_dim, dout * reference_dim);
  ComplexMatrix output = ComplexMatrix::Zero(dout, dout);
  for (const auto& k : channel.kraus()) {
    const ComplexMatrix out_amp = k * amp;  // dout x reference
    ComplexVector phi(dout * reference_dim);
    for (Index s = 0; s < dout; ++s) {
      for (Index r = 0; r < reference_dim; ++r) phi(s * reference_dim + r) = out_amp(s, r);
    }
    joint.noalias() += phi * phi.adjoint();
    output.noalias() += out_amp * out_amp.adjoint();
  }
  return entropy_of(output) - entropy_of(joint);
}

double entropy_exchange(const QuantumChannel& channel, const DensityOperator& rho) {
  if (rho.dim() != channel.dim_in()) throw DimensionMismatch("input state does not match the channel");
  return entropy_of(complementary_output(channel, rho.matrix()));
}

double coherent_information_complementary(const QuantumChannel& channel, const DensityOperator& rho) {
  return entropy_of(channel.apply(rho.matrix())) - entropy_exchange(channel, rho);
}

void Ensemble::validate() const {
  if (items.empty()) throw std::domain_error("ensemble is empty");
  double total = 0.0;
  for (const auto& [p, state] : items) {
    if (!(p >= 0.0)) throw std::domain_error("ensemble weights must be non-negative");
    if (state.dim() != items.front().second.dim()) throw DimensionMismatch("ensemble states differ in dimension");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::domain_error("ensemble weights must sum to 1");
}

double holevo_information(const QuantumChannel& channel, const Ensemble& ensemble) {
  ensemble.validate();
  if (ensemble.items.front().second.dim() != channel.dim_in()) {
    throw DimensionMismatch("ensemble states do not match the channel");
  }
  const Index d = channel.dim_out();
  ComplexMatrix average = ComplexMatrix::Zero(d, d);
  double conditional = 0.0;
  for (const auto& [p, state] : ensemble.items) {
    if (p == 0.0) continue;
    const ComplexMatrix out = channel.apply(state.matrix());
    average += p * out;
    conditional += p * entropy_of(out);
  }
  return std::max(0.0, entropy_of(average) - conditional);
}

Ensemble computational_basis_ensemble(Index dim) {
  Ensemble e;
  for (Index k = 0; k < dim; ++k) e.items.emplace_back(1.0 / static_cast<double>(dim), DensityOperator::basis(dim, k));
  return e;
}

OneShotResult one_shot_q_search(const QuantumChannel& channel) {
  if (channel.dim_in() != 2) throw DimensionMismatch("one-shot search needs a qubit input");
  auto objective = [&](const std::array<double, 3>& r) {
    return coherent_information(channel, DensityOperator(bloch_density(r)));
  };

  OneShotResult best{objective({0.0, 0.0, 0.0}), {0.0, 0.0, 0.0}};
  constexpr int kGrid = 11;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      for (int k = 0; k < kGrid; ++k) {
        const std::array<double, 3> r{-1.0 + 0.2 * i, -1.0 + 0.2 * j, -1.0 + 0.2 * k};
        if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] > 1.0 + 1e-12) continue;
        const double v = objective(into_ball(r));
        if (improves(v, best.value)) best = {v, into_ball(r)};
      }
    }
  }

  for (double step = 0.1; step > 1e-7;) {
    bool moved = false;
    for (int axis = 0; axis < 3 && !moved; ++axis) {
      for (double sign : {1.0, -1.0}) {
        auto r = best.bloch;
        r[static_cast<std::size_t>(axis)] += sign * step;
        r = into_ball(r);
        const double v = objective(r);
        if (improves(v, best.value)) {
          best = {v, r};
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  best.value = std::max(0.0, best.value);
  return best;
}

double one_shot_q_lower(const QuantumChannel& channel) { return one_shot_q_search(channel).value; }

double quantum_capacity_lower(const QuantumChannel& channel) {
  if (const auto g = dephasing_factor(channel)) return dephasing_quantum_capacity(std::abs(*g) > 1.0 ? 1.0 : std::abs(*g));
  if (channel.dim_in() == 2) return one_shot_q_lower(channel);
  return std::max(0.0, coherent_information_complementary(
                           channel, DensityOperator::maximally_mixed(channel.dim_in())));
}

double classical_capacity_lower(const QuantumChannel& channel) {
  if (dephasing_factor(channel)) return 1.0;
  return holevo_information(channel, computational_basis_ensemble(channel.dim_in()));
}

std::vector<double> controlled_coherent_bounds(const EnvironmentModel& env, double intra_tau,
                                               int max_group) {
  if (max_group < 1) throw std::domain_error("max_group must be >= 1");
  const auto blocks = controlled_blocks(env);
  if (!blocks) throw std::invalid_argument("coupling is not carrier-controlled");
  const QuantumChannel relax = env.relaxation(intra_tau);
  const double log_d = std::log2(static_cast<double>(env.carrier_dim()));
  const double weight = 1.0 / static_cast<double>(blocks->size());

  ComplexMatrix sigma = env.sigma0().matrix();
  double accumulated = entropy_of(sigma);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_group));
  for (int m = 1; m <= max_group; ++m) {
    ComplexMatrix mixed = ComplexMatrix::Zero(sigma.rows(), sigma.cols());
    for (const auto& v : *blocks) mixed.noalias() += weight * (v * sigma * v.adjoint());
    sigma = mixed;
    out.push_back(static_cast<double>(m) * log_d - (accumulated + entropy_of(sigma)));
    accumulated += entropy_of(complementary_output(relax, sigma));
    sigma = relax.apply(sigma);
  }
  return out;
}

const char* regime_name(RateRegime regime) {
  switch (regime) {
    case RateRegime::kMemoryless: return "memoryless";
    case RateRegime::kPerfect: return "perfect";
    case RateRegime::kGrouped: return "grouped";
    case RateRegime::kAttenuation: return "attenuation";
    case RateRegime::kBound: return "bound";
  }
  return "unknown";
}

double rate_regular(double capacity, double tau_s) {
  if (!(tau_s > 0.0)) throw std::domain_error("tau_s must be positive");
  return capacity / tau_s;
}

RateInterval rate_interval(double capacity, const SequenceStats& stats) {
  if (!(stats.tau_prime > 0.0)) throw std::domain_error("tau' must be positive");
  return {capacity / stats.tau_double_prime, capacity / stats.tau_prime};
}

RateReport memoryless_rates(const EnvironmentModel& env, double tau_s) {
  if (!(tau_s >= env.tau_e())) throw std::domain_error("memoryless regime needs tau_s >= tauE");
  const QuantumChannel n = memoryless_map(env);
  RateReport r;
  r.regime = RateRegime::kMemoryless;
  r.r_q = rate_regular(quantum_capacity_lower(n), tau_s);
  r.r_c = rate_regular(classical_capacity_lower(n), tau_s);
  r.upper_bound = rate_regular(std::log2(static_cast<double>(env.carrier_dim())), tau_s);
  r.config.tau = tau_s;
  return r;
}

RateReport perfect_memory_rates(Index carrier_dim, double tau_s) {
  if (carrier_dim < 2) throw DimensionMismatch("carriers need dimension >= 2");
  RateReport r;
  r.regime = RateRegime::kPerfect;
  r.r_q = r.r_c = r.upper_bound = rate_regular(std::log2(static_cast<double>(carrier_dim)), tau_s);
  r.config.tau = tau_s;
  return r;
}

RateReport grouped_rates(const EnvironmentModel& env, int m, double tau) {
  if (m < 1) throw std::domain_error("group size must be >= 1");
  if (!(tau > 0.0)) throw std::domain_error("carrier spacing must be positive");
  const Index d = env.carrier_dim();
  const double period = period_of(m, tau, env.tau_e());
  const double log_d = std::log2(static_cast<double>(d));

  RateReport r;
  r.config = {m, 0, tau, 1.0};
  r.upper_bound = log_d / (m > 1 ? tau : std::max(tau, env.tau_e()));
  if (m <= exact_group_limit(d)) {
    const std::vector<double> intra(static_cast<std::size_t>(m - 1), tau);
    const QuantumChannel map = grouped_map(env, intra);
    r.regime = m == 1 ? RateRegime::kMemoryless : RateRegime::kGrouped;
    if (m == 1) {
      r.r_q = quantum_capacity_lower(map) / period;
      r.r_c = classical_capacity_lower(map) / period;
    } else {
      const auto mixed = DensityOperator::maximally_mixed(map.dim_in());
      r.r_q = std::max(0.0, coherent_information_complementary(map, mixed)) / period;
      r.r_c = holevo_information(map, computational_basis_ensemble(map.dim_in())) / period;
    }
    return r;
  }
  const auto bounds = controlled_coherent_bounds(env, tau, m);
  r.regime = RateRegime::kBound;
  r.r_q = std::max(0.0, bounds.back()) / period;
  // Computational-basis states pass a controlled coupling undisturbed.
  r.r_c = static_cast<double>(m) * log_d / period;
  return r;
}

RateReport rate_attenuation(const AttenuationProtocol& proto) {
  proto.validate();
  const double g = attenuated_gbar(proto);
  const double period = static_cast<double>(proto.n) * proto.tau + proto.tau_e;
  RateReport r;
  r.regime = proto.n == 0 ? RateRegime::kMemoryless : RateRegime::kAttenuation;
  r.r_q = dephasing_quantum_capacity(g) / period;
  r.r_c = dephasing_classical_capacity(g) / period;
  r.upper_bound = 1.0 / (proto.n == 0 ? proto.tau_e : std::min(proto.tau, proto.tau_e));
  r.config = {1, proto.n, proto.tau, proto.p};
  return r;
}

GammaPoint gamma_point(double lambda, int n, double tau, double tau_e) {
  const GbarOptimum opt = optimize_gbar(lambda, n, tau, tau_e);
  GammaPoint pt;
  pt.lambda = lambda;
  pt.n = n;
  pt.tau_over_tau_e = tau / tau_e;
  pt.p_star = opt.p;
  pt.gbar = opt.gbar;
  pt.g0 = std::sqrt(lambda);
  const double q0 = dephasing_quantum_capacity(pt.g0);
  if (q0 <= 0.0) throw std::domain_error("Gamma is undefined when Q(N) = 0 (lambda = 0)");
  const double period = static_cast<double>(n) * tau + tau_e;
  const double q = dephasing_quantum_capacity(opt.gbar);
  pt.gamma = (tau_e / period) * (q / q0);
  pt.rbar_q = q / period;
  pt.r_q_s0 = q0 / tau_e;
  return pt;
}

double gamma_ratio(double lambda, int n, double tau, double tau_e) {
  return gamma_point(lambda, n, tau, tau_e).gamma;
}

RateReport best_rate_search(double tau_min, const EnvironmentModel& env, int budget,
                            const RateSearchOptions& options) {
  if (!(tau_min > 0.0)) throw std::domain_error("tau_min must be positive");
  if (budget < 0) throw std::domain_error("budget must be >= 0");
  const Index d = env.carrier_dim();
  const double log_d = std::log2(static_cast<double>(d));
  const double tau_e = env.tau_e();

  RateReport best;
  best.r_q = -1.0;
  best.r_c = -1.0;
  auto consider = [&](double r_q, double r_c, RateRegime regime, const RateConfig& config) {
    if (improves(r_q, best.r_q)) {
      best.r_q = r_q;
      best.regime = regime;
      best.config = config;
    }
    if (improves(r_c, best.r_c)) best.r_c = r_c;
  };

  const int exact = exact_group_limit(d);
  for (int m = 1; m <= exact; ++m) {
    const RateReport g = grouped_rates(env, m, tau_min);
    consider(g.r_q, g.r_c, g.regime, g.config);
  }
  if (options.max_group > exact && controlled_blocks(env)) {
    const auto bounds = controlled_coherent_bounds(env, tau_min, options.max_group);
    for (int m = exact + 1; m <= options.max_group; ++m) {
      const double period = period_of(m, tau_min, tau_e);
      consider(std::max(0.0, bounds[static_cast<std::size_t>(m - 1)]) / period,
               static_cast<double>(m) * log_d / period, RateRegime::kBound, {m, 0, tau_min, 1.0});
    }
  }

  std::vector<double> taus;
  if (tau_min < tau_e && options.tau_points > 1) {
    for (int k = 0; k < options.tau_points; ++k) {
      taus.push_back(tau_min + (tau_e - tau_min) * k / (options.tau_points - 1));
    }
  } else {
    taus.push_back(tau_min);
  }
  const int p_points = std::max(options.p_points, 2);
  for (int n = 1; n <= budget; ++n) {
    for (double tau : taus) {
      for (int i = 0; i < p_points; ++i) {
        const double p = static_cast<double>(i) / (p_points - 1);
        std::vector<double> populations(static_cast<std::size_t>(d), (1.0 - p) / static_cast<double>(d - 1));
        populations[0] = p;
        const auto sigmas = iterate_environment(env, DensityOperator::diagonal(populations), n, tau);
        const QuantumChannel modified = lifted_map(env, sigmas.back());
        const double period = static_cast<double>(n) * tau + std::max(tau_e, tau_min);
        consider(quantum_capacity_lower(modified) / period, classical_capacity_lower(modified) / period,
                 RateRegime::kAttenuation, {1, n, tau, p});
      }
    }
  }

  best.upper_bound = log_d / tau_min;
  return best;
}

}  // namespace memchan
