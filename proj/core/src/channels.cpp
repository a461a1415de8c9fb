#include "memchan/channels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace memchan {
namespace {

void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << value << " is outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

Index checked_power(Index base, int exponent, Index limit, const char* what) {
  Index out = 1;
  for (int i = 0; i < exponent; ++i) {
    out *= base;
    if (out > limit) {
      std::ostringstream msg;
      msg << what << " exceeds the dimension budget of " << limit;
      throw BudgetExceeded(msg.str());
    }
  }
  return out;
}

struct WeightedVector {
  double weight;
  ComplexVector vector;
};

std::vector<WeightedVector> spectral_terms(const DensityOperator& sigma) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sigma.matrix());
  std::vector<WeightedVector> terms;
  for (Index k = sigma.dim(); k-- > 0;) {
    const double q = solver.eigenvalues()(k);
    if (q <= 1e-15) continue;
    terms.push_back({q, solver.eigenvectors().col(k)});
  }
  return terms;
}

// Kraus propagation through U_1, E_1, ..., U_n. `relax(j)` returns the
// relaxation applied after interaction j (1-based), or nullopt to skip it.
QuantumChannel compose_impl(const EnvironmentModel& env, int n,
                            const std::function<std::optional<QuantumChannel>(int)>& relax) {
  if (n < 1) throw std::domain_error("a carrier sequence needs n >= 1");
  const Index d = env.carrier_dim();
  const Index de = env.env_dim();
  checked_power(d, 2 * n, kMaxChoiDimension, "Choi dimension of the composed channel");
  const Index dn = checked_power(d, n, kMaxChoiDimension, "carrier space");

  std::vector<Index> dims(static_cast<std::size_t>(n), d);
  dims.push_back(de);
  const ComplexMatrix carriers_id = ComplexMatrix::Identity(dn, dn);

  std::vector<ComplexMatrix> kraus;
  for (const auto& term : spectral_terms(env.sigma0())) {
    kraus.push_back(tensor(carriers_id, std::sqrt(term.weight) * ComplexMatrix(term.vector)));
  }

  for (int j = 1; j <= n; ++j) {
    const std::vector<Index> targets{j - 1, n};
    const ComplexMatrix w = embed_operator(env.coupling(), dims, targets);
    for (auto& k : kraus) k = w * k;
    if (j == n) break;
    const auto relaxation = relax(j);
    if (!relaxation) continue;
    std::vector<ComplexMatrix> next;
    next.reserve(kraus.size() * relaxation->kraus().size());
    for (const auto& e : relaxation->kraus()) {
      const ComplexMatrix lifted = tensor(carriers_id, e);
      for (const auto& k : kraus) next.push_back(lifted * k);
    }
    kraus = compress_kraus(next);
  }

  std::vector<ComplexMatrix> traced;
  traced.reserve(kraus.size() * static_cast<std::size_t>(de));
  for (const auto& k : kraus) {
    for (Index e = 0; e < de; ++e) {
      ComplexMatrix block(dn, dn);
      for (Index c = 0; c < dn; ++c) block.row(c) = k.row(c * de + e);
      traced.push_back(std::move(block));
    }
  }
  return QuantumChannel(dn, dn, compress_kraus(traced));
}

}  // namespace

ComplexMatrix theta_matrix(double lambda) {
  require_unit_interval(lambda, "lambda");
  const double a = std::sqrt(lambda);
  const double b = std::sqrt(1.0 - lambda);
  ComplexMatrix theta(2, 2);
  theta << a, b, b, -a;
  return theta;
}

ComplexMatrix qubit_control_coupling(double lambda) {
  const ComplexMatrix theta = theta_matrix(lambda);
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u.block(0, 0, 2, 2).setIdentity();
  u.block(2, 2, 2, 2) = theta;
  return u;
}

QuantumChannel amplitude_damping(double eta) {
  require_unit_interval(eta, "eta");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(eta);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(1.0 - eta);
  return QuantumChannel(2, 2, {k0, k1});
}

double eta_profile(double tau, double tau_e) {
  if (!(tau_e > 0.0)) throw std::domain_error("tauE must be positive");
  if (tau < 0.0) throw std::domain_error("tau must be non-negative");
  return tau < tau_e ? 1.0 - tau / tau_e : 0.0;
}

QuantumChannel phase_damping(double g) {
  if (!(std::abs(g) <= 1.0)) {
    std::ostringstream msg;
    msg << "phase damping factor |g| = " << std::abs(g) << " > 1 is not completely positive";
    throw std::domain_error(msg.str());
  }
  ComplexMatrix k0 = ComplexMatrix::Identity(2, 2) * std::sqrt((1.0 + g) / 2.0);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 0) = std::sqrt((1.0 - g) / 2.0);
  k1(1, 1) = -std::sqrt((1.0 - g) / 2.0);
  return QuantumChannel(2, 2, {k0, k1});
}

EnvironmentModel::EnvironmentModel(Index carrier_dim, Index env_dim, ComplexMatrix coupling,
                                   RelaxationFamily relaxation, DensityOperator sigma0,
                                   double tau_e)
    : carrier_dim_(carrier_dim),
      env_dim_(env_dim),
      coupling_(std::move(coupling)),
      relaxation_(std::move(relaxation)),
      sigma0_(std::move(sigma0)),
      tau_e_(tau_e) {
  if (carrier_dim_ <= 0 || env_dim_ <= 0) throw DimensionMismatch("dimensions must be positive");
  const Index joint = carrier_dim_ * env_dim_;
  if (coupling_.rows() != joint || coupling_.cols() != joint) {
    throw DimensionMismatch("coupling must act on carrier (x) LE");
  }
  if (!is_unitary(coupling_)) throw InvalidState("coupling is not unitary to 1e-12");
  if (sigma0_.dim() != env_dim_) throw DimensionMismatch("sigma0 must be an LE state");
  if (!(tau_e_ > 0.0)) throw std::domain_error("tauE must be positive");
  if (!relaxation_) throw std::invalid_argument("relaxation family is empty");
}

QuantumChannel EnvironmentModel::relaxation(double tau) const {
  if (!(tau >= 0.0)) throw std::domain_error("relaxation time must be non-negative");
  QuantumChannel e = relaxation_(tau);
  if (e.dim_in() != env_dim_ || e.dim_out() != env_dim_) {
    throw DimensionMismatch("relaxation map does not act on the LE");
  }
  return e;
}

EnvironmentModel qubit_dephasing_environment(double lambda, double tau_e, EtaProfile profile) {
  RelaxationFamily family = [tau_e, profile = std::move(profile)](double tau) {
    return amplitude_damping(profile(tau, tau_e));
  };
  return EnvironmentModel(2, 2, qubit_control_coupling(lambda), std::move(family),
                          DensityOperator::basis(2, 0), tau_e);
}

RelaxationDeviations relaxation_deviations(const EnvironmentModel& env) {
  RelaxationDeviations dev;
  const ComplexMatrix& sigma0 = env.sigma0().matrix();
  for (double f : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const auto e = env.relaxation(f * env.tau_e());
    dev.stationarity = std::max(dev.stationarity, max_abs_difference(e.apply(sigma0), sigma0));
  }
  const Index de = env.env_dim();
  for (double f : {1.0, 1.5, 2.0}) {
    const auto e = env.relaxation(f * env.tau_e());
    for (Index i = 0; i < de; ++i) {
      for (Index j = 0; j < de; ++j) {
        ComplexMatrix op = ComplexMatrix::Zero(de, de);
        op(i, j) = 1.0;
        const ComplexMatrix expected = i == j ? sigma0 : ComplexMatrix::Zero(de, de);
        dev.full_relaxation = std::max(dev.full_relaxation, max_abs_difference(e.apply(op), expected));
      }
    }
  }
  dev.identity_at_zero = choi_distance(env.relaxation(0.0), QuantumChannel::identity(de));
  return dev;
}

void CarrierSequence::validate() const {
  if (periodic && pattern.empty()) throw std::domain_error("periodic pattern is empty");
  for (double t : pattern) {
    if (!std::isfinite(t) || t < 0.0) {
      throw std::domain_error("carrier intervals must be finite and non-negative");
    }
  }
}

double CarrierSequence::interval(std::size_t j) const {
  if (periodic) {
    if (pattern.empty()) throw std::out_of_range("empty periodic pattern");
    return pattern[j % pattern.size()];
  }
  if (j >= pattern.size()) throw std::out_of_range("sequence has fewer carriers than requested");
  return pattern[j];
}

QuantumChannel lifted_map(const EnvironmentModel& env, const DensityOperator& sigma) {
  if (sigma.dim() != env.env_dim()) throw DimensionMismatch("sigma must be an LE state");
  const Index d = env.carrier_dim();
  const Index de = env.env_dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  std::vector<ComplexMatrix> kraus;
  for (const auto& term : spectral_terms(sigma)) {
    const ComplexMatrix full =
        env.coupling() * tensor(id, std::sqrt(term.weight) * ComplexMatrix(term.vector));
    for (Index e = 0; e < de; ++e) {
      ComplexMatrix block(d, d);
      for (Index c = 0; c < d; ++c) block.row(c) = full.row(c * de + e);
      kraus.push_back(std::move(block));
    }
  }
  return QuantumChannel(d, d, compress_kraus(kraus));
}

QuantumChannel memoryless_map(const EnvironmentModel& env) { return lifted_map(env, env.sigma0()); }

QuantumChannel compose_sequence(const EnvironmentModel& env, const CarrierSequence& s, int n) {
  s.validate();
  if (n > 1 && !s.periodic && s.pattern.size() < static_cast<std::size_t>(n - 1)) {
    throw std::out_of_range("sequence has fewer carriers than requested");
  }
  return compose_impl(env, n, [&](int j) -> std::optional<QuantumChannel> {
    return env.relaxation(s.interval(static_cast<std::size_t>(j - 1)));
  });
}

QuantumChannel perfect_memory_map(const EnvironmentModel& env, int n) {
  return compose_impl(env, n, [](int) -> std::optional<QuantumChannel> { return std::nullopt; });
}

QuantumChannel grouped_map(const EnvironmentModel& env, std::span<const double> intra_intervals) {
  CarrierSequence s{{intra_intervals.begin(), intra_intervals.end()}, false};
  return compose_sequence(env, s, static_cast<int>(intra_intervals.size()) + 1);
}

DensityOperator evolve_sequence(const EnvironmentModel& env, const CarrierSequence& s,
                                const DensityOperator& input) {
  s.validate();
  const Index d = env.carrier_dim();
  const Index de = env.env_dim();
  int n = 0;
  Index dn = 1;
  while (dn < input.dim()) {
    dn *= d;
    ++n;
  }
  if (dn != input.dim() || n < 1) {
    throw DimensionMismatch("input is not a state of whole carriers");
  }
  if (dn * de > kMaxJointDimension) {
    throw BudgetExceeded("carriers (x) LE exceeds the joint dimension budget");
  }

  std::vector<Index> dims(static_cast<std::size_t>(n), d);
  dims.push_back(de);
  const ComplexMatrix carriers_id = ComplexMatrix::Identity(dn, dn);
  ComplexMatrix joint = tensor(input.matrix(), env.sigma0().matrix());
  for (int j = 1; j <= n; ++j) {
    const std::vector<Index> targets{j - 1, n};
    const ComplexMatrix w = embed_operator(env.coupling(), dims, targets);
    joint = w * joint * w.adjoint();
    if (j == n) break;
    const auto e = env.relaxation(s.interval(static_cast<std::size_t>(j - 1)));
    ComplexMatrix relaxed = ComplexMatrix::Zero(joint.rows(), joint.cols());
    for (const auto& k : e.kraus()) {
      const ComplexMatrix lifted = tensor(carriers_id, k);
      relaxed.noalias() += lifted * joint * lifted.adjoint();
    }
    joint = std::move(relaxed);
  }
  std::vector<Index> keep(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) keep[static_cast<std::size_t>(j)] = j;
  return DensityOperator(partial_trace(joint, dims, keep));
}

std::optional<std::vector<ComplexMatrix>> controlled_blocks(const EnvironmentModel& env,
                                                            double tolerance) {
  const Index d = env.carrier_dim();
  const Index de = env.env_dim();
  const ComplexMatrix& u = env.coupling();
  std::vector<ComplexMatrix> blocks;
  for (Index k = 0; k < d; ++k) {
    for (Index kp = 0; kp < d; ++kp) {
      if (k == kp) continue;
      if (u.block(k * de, kp * de, de, de).cwiseAbs().maxCoeff() > tolerance) return std::nullopt;
    }
    blocks.push_back(u.block(k * de, k * de, de, de));
  }
  return blocks;
}

std::optional<Complex> dephasing_factor(const QuantumChannel& channel, double tolerance) {
  if (channel.dim_in() != 2 || channel.dim_out() != 2) return std::nullopt;
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  for (Index k = 0; k < 2; ++k) {
    ComplexMatrix proj = zero;
    proj(k, k) = 1.0;
    if (max_abs_difference(channel.apply(proj), proj) > tolerance) return std::nullopt;
  }
  ComplexMatrix coherence = zero;
  coherence(0, 1) = 1.0;
  const ComplexMatrix out = channel.apply(coherence);
  const Complex g = out(0, 1);
  ComplexMatrix expected = zero;
  expected(0, 1) = g;
  if (max_abs_difference(out, expected) > tolerance) return std::nullopt;
  return g;
}

}  // namespace memchan
