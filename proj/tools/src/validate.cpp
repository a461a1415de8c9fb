#include "memchan_cli/validate.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "memchan/attenuation.hpp"
#include "memchan/markov.hpp"
#include "memchan/rates.hpp"

namespace memchan::cli {
namespace {

constexpr double kLambdas[] = {0.01, 0.25, 0.6, 0.81};

// A relaxation family with eta held fixed. eta > 1 has no amplitude damping
// meaning; it is mapped to damping towards |1> with rate 1/eta so the family
// stays trace preserving while breaking the fixed point.
EnvironmentModel test_environment(double lambda, const ValidateOptions& options) {
  if (!options.fault_eta) return qubit_dephasing_environment(lambda);
  const double eta = *options.fault_eta;
  RelaxationFamily family;
  if (eta <= 1.0) {
    family = [eta](double) { return amplitude_damping(eta); };
  } else {
    family = [eta](double) {
      ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
      k0(0, 0) = 1.0 / std::sqrt(eta);
      k0(1, 1) = 1.0;
      ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
      k1(1, 0) = std::sqrt(1.0 - 1.0 / eta);
      return QuantumChannel(2, 2, {k0, k1});
    };
  }
  return EnvironmentModel(2, 2, qubit_control_coupling(lambda), std::move(family),
                          DensityOperator::basis(2, 0), 1.0);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

CheckResult threshold(std::string name, double worst, double limit) {
  return {std::move(name), worst <= limit, "max deviation " + fmt(worst) + " (limit " + fmt(limit) + ")"};
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

ComplexMatrix trace_last_qubit(const ComplexMatrix& op, int carriers) {
  std::vector<Index> dims(static_cast<std::size_t>(carriers), 2);
  std::vector<Index> keep;
  for (int i = 0; i + 1 < carriers; ++i) keep.push_back(i);
  return partial_trace(op, dims, keep);
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(20240917);

  out.push_back(guarded("kraus-completeness", [&] {
    double worst = 0.0;
    auto note = [&](const QuantumChannel& c) { worst = std::max(worst, c.completeness_error()); };
    for (double eta : {0.0, 0.3, 1.0}) note(amplitude_damping(eta));
    for (double g : {-1.0, 0.0, 0.4, 1.0}) note(phase_damping(g));
    for (double lambda : kLambdas) {
      const auto env = test_environment(lambda, options);
      for (double tau : {0.0, 0.3, 1.0, 2.0}) note(env.relaxation(tau));
      note(memoryless_map(env));
      note(compose_sequence(env, CarrierSequence{{0.4, 0.7}, false}, 3));
      note(perfect_memory_map(env, 2));
      const std::array<double, 2> intra{0.1, 0.2};
      note(grouped_map(env, intra));
      note(modified_map(AttenuationProtocol{2, 0.4, 0.6, lambda, 1.0}));
    }
    const auto rot = rotating_decoherent_relaxation();
    for (double tau : {0.0, 0.5, 1.0}) note(decoherent_channel(rot, tau));
    note(decoherent_channel(dephasing_decoherent_relaxation(3), 0.5));
    return threshold("kraus-completeness", worst, tol::kKrausCompleteness);
  }));

  out.push_back(guarded("coupling-unitarity", [&] {
    double worst = 0.0;
    for (double lambda : kLambdas) {
      const ComplexMatrix u = qubit_control_coupling(lambda);
      worst = std::max(worst, (u.adjoint() * u - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff());
    }
    return threshold("coupling-unitarity", worst, tol::kUnitarity);
  }));

  RelaxationDeviations dev;
  std::string env_error;
  try {
    for (double lambda : kLambdas) {
      const auto d = relaxation_deviations(test_environment(lambda, options));
      dev.stationarity = std::max(dev.stationarity, d.stationarity);
      dev.full_relaxation = std::max(dev.full_relaxation, d.full_relaxation);
      dev.identity_at_zero = std::max(dev.identity_at_zero, d.identity_at_zero);
    }
    for (const auto& spec : {rotating_decoherent_relaxation(), dephasing_decoherent_relaxation(2)}) {
      const auto d = relaxation_deviations(DecoherentEnvironment{2, qubit_control_coupling(0.3), spec}.to_environment());
      dev.stationarity = std::max(dev.stationarity, d.stationarity);
      dev.full_relaxation = std::max(dev.full_relaxation, d.full_relaxation);
      // decoherent families erase coherences even at tau = 0
    }
  } catch (const std::exception& e) {
    env_error = e.what();
  }
  auto relax_check = [&](const char* name, double value) {
    if (!env_error.empty()) return CheckResult{name, false, "threw: " + env_error};
    return threshold(name, value, 1e-12);
  };
  out.push_back(relax_check("stationarity", dev.stationarity));
  out.push_back(relax_check("full-relaxation", dev.full_relaxation));
  out.push_back(relax_check("identity-at-zero", dev.identity_at_zero));

  // Later carriers cannot influence the reduced output of earlier ones.
  out.push_back(guarded("causality", [&] {
    double worst = 0.0;
    for (double lambda : kLambdas) {
      const auto env = test_environment(lambda, options);
      const CarrierSequence s{{0.3, 0.2}, false};
      const auto phi3 = compose_sequence(env, s, 3);
      const auto phi2 = compose_sequence(env, s, 2);
      for (int trial = 0; trial < 3; ++trial) {
        const DensityOperator r12 = random_density(4, rng);
        const DensityOperator r3 = random_density(2, rng);
        const ComplexMatrix lhs = trace_last_qubit(phi3.apply(tensor(r12, r3).matrix()), 3);
        worst = std::max(worst, max_abs_difference(lhs, phi2.apply(r12.matrix())));
      }
    }
    return threshold("causality", worst, 1e-10);
  }));

  out.push_back(guarded("factorization", [&] {
    double worst = 0.0;
    for (double lambda : kLambdas) {
      const auto env = test_environment(lambda, options);
      const auto n = memoryless_map(env);
      const auto nn = tensor(n, n);
      worst = std::max(worst, choi_distance(compose_sequence(env, CarrierSequence{{1.0}, false}, 2), nn));
      const std::array<double, 1> intra{0.2};
      const auto g = grouped_map(env, intra);
      worst = std::max(worst, choi_distance(compose_sequence(env, CarrierSequence{{0.2, 1.5, 0.2}, false}, 4),
                                            tensor(g, g)));
    }
    return threshold("factorization", worst, 1e-10);
  }));

  out.push_back(guarded("purification-invariance", [&] {
    double worst = 0.0;
    for (double lambda : kLambdas) {
      const auto channel = compose_sequence(test_environment(lambda, options), CarrierSequence{{0.4}, false}, 2);
      const DensityOperator rho = random_density(4, rng);
      const double base = coherent_information(channel, rho);
      // Another purification: a unitary on the reference.
      const PureState psi = purify(rho);
      const Index ref = psi.dim() / 4;
      const ComplexMatrix v = tensor(ComplexMatrix::Identity(4, 4), random_unitary(ref, rng));
      const double other = coherent_information(channel, PureState::normalized(v * psi.amplitudes()), ref);
      worst = std::max(worst, std::abs(base - other));
    }
    return threshold("purification-invariance", worst, 1e-9);
  }));

  out.push_back(guarded("trajectory-y-zero", [&] {
    double worst = 0.0;
    for (double lambda : kLambdas) {
      for (double p : {0.0, 0.37, 1.0}) {
        const auto traj = iterate_environment(AttenuationProtocol{8, 0.45, p, lambda, 1.0});
        for (const auto& pt : traj.points) worst = std::max(worst, std::abs(pt.y));
      }
    }
    return threshold("trajectory-y-zero", worst, 1e-12);
  }));

  out.push_back(guarded("closed-form", [&] {
    double worst = 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(0, 30);
    for (int i = 0; i < 20; ++i) {
      const double p = unit(rng), lambda = unit(rng), eta = unit(rng);
      const int n = count(rng);
      const auto sol = closed_form_solution(p, lambda, eta, n);
      if (!sol) continue;
      worst = std::max(worst, std::abs(sol->gbar - iterated_gbar(p, lambda, eta, n)));
    }
    return threshold("closed-form", worst, 1e-9);
  }));

  out.push_back(guarded("markov-reconstruction", [&] {
    double worst = 0.0;
    const DecoherentEnvironment denv{2, qubit_control_coupling(0.3), rotating_decoherent_relaxation()};
    const auto env = denv.to_environment();
    const CarrierSequence s{{0.25, 0.6}, false};
    for (int n = 1; n <= 3; ++n) {
      const auto decomp = markov_decompose(denv, s, n);
      const auto direct = compose_sequence(env, s, n);
      const DensityOperator r = random_density(Index{1} << n, rng);
      worst = std::max(worst, trace_distance(markov_reconstruct(decomp, r).matrix(), direct.apply(r.matrix())));
    }
    return threshold("markov-reconstruction", worst, 1e-10);
  }));

  return out;
}

}  // namespace memchan::cli
