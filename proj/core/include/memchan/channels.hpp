#pragma once

// Channel constructors for the carrier / local-environment collision model
// and the engine composing a carrier sequence into a multi-carrier map.
//
// Carriers interact one at a time with a finite local environment (LE)
// through a fixed coupling unitary U on carrier (x) LE. Between carrier j and
// carrier j+1 the LE relaxes for a time tau_j under E_tau. The LE starts in
// its stationary state sigma0. Times are measured in the same unit as tauE.

#include <functional>
#include <optional>
#include <vector>

#include "memchan/qcore.hpp"
#include "memchan/quantum_channel.hpp"

namespace memchan {

/// Largest Choi dimension (dim_in * dim_out) a composed multi-carrier channel
/// may have; 4096 allows six qubit carriers.
inline constexpr Index kMaxChoiDimension = 4096;
/// Largest carriers (x) LE dimension for single-input propagation.
inline constexpr Index kMaxJointDimension = 4096;

using RelaxationFamily = std::function<QuantumChannel(double tau)>;
using EtaProfile = std::function<double(double tau, double tau_e)>;

/// Theta(lambda) = [[sqrt(l), sqrt(1-l)], [sqrt(1-l), -sqrt(l)]].
ComplexMatrix theta_matrix(double lambda);

/// |0><0| (x) I + |1><1| (x) Theta(lambda) on carrier (x) LE.
/// Throws std::domain_error unless lambda is in [0, 1].
ComplexMatrix qubit_control_coupling(double lambda);

/// Qubit amplitude damping with Kraus pair {diag(1, sqrt(eta)),
/// sqrt(1-eta)|0><1|}. Throws std::domain_error unless eta is in [0, 1].
QuantumChannel amplitude_damping(double eta);

/// 1 - tau/tauE for tau < tauE, 0 afterwards.
double eta_profile(double tau, double tau_e);

/// Phase damping P_g: populations fixed, |0><1| scaled by g.
/// Throws std::domain_error when |g| > 1 (the map would not be CP).
QuantumChannel phase_damping(double g);

class EnvironmentModel {
 public:
  /// Throws when U is not unitary on carrier_dim * env_dim, when sigma0 does
  /// not live on the LE, or when tauE is not positive. The relaxation family
  /// is not probed here; see relaxation_deviations().
  EnvironmentModel(Index carrier_dim, Index env_dim, ComplexMatrix coupling,
                   RelaxationFamily relaxation, DensityOperator sigma0, double tau_e);

  Index carrier_dim() const { return carrier_dim_; }
  Index env_dim() const { return env_dim_; }
  const ComplexMatrix& coupling() const { return coupling_; }
  const DensityOperator& sigma0() const { return sigma0_; }
  double tau_e() const { return tau_e_; }

  /// E_tau; throws DimensionMismatch if the family returns a map of the
  /// wrong shape and std::domain_error for negative tau.
  QuantumChannel relaxation(double tau) const;

 private:
  Index carrier_dim_;
  Index env_dim_;
  ComplexMatrix coupling_;
  RelaxationFamily relaxation_;
  DensityOperator sigma0_;
  double tau_e_;
};

/// Qubit carriers, qubit LE, controlled-Theta(lambda) coupling, amplitude
/// damping relaxation with eta(tau) from `profile`, sigma0 = |0><0|.
EnvironmentModel qubit_dephasing_environment(double lambda, double tau_e = 1.0,
                                             EtaProfile profile = eta_profile);

/// Maximum deviations of the relaxation family from its defining properties.
struct RelaxationDeviations {
  /// max over tau in {0, 1/4, 1/2, 1, 2} tauE of |E_tau(sigma0) - sigma0|.
  double stationarity = 0.0;
  /// max over tau in {1, 3/2, 2} tauE and basis operators |i><j| of
  /// |E_tau(|i><j|) - sigma0 delta_ij|.
  double full_relaxation = 0.0;
  /// Choi distance between E_0 and the identity map.
  double identity_at_zero = 0.0;
};
RelaxationDeviations relaxation_deviations(const EnvironmentModel& env);

/// Time pattern of a carrier sequence. interval(j) is the time between
/// carrier j+1 and carrier j+2 (0-based j); a periodic pattern repeats.
struct CarrierSequence {
  std::vector<double> pattern;
  bool periodic = false;

  /// Throws std::domain_error for negative or non-finite intervals and for
  /// an empty periodic pattern.
  void validate() const;
  /// Throws std::out_of_range past the end of a finite pattern.
  double interval(std::size_t j) const;
  /// Number of carriers a finite pattern describes (pattern.size() + 1).
  std::size_t finite_carrier_count() const { return pattern.size() + 1; }
};

/// Tr_LE{U (rho (x) sigma) U^dag} as a carrier channel, for any LE state.
QuantumChannel lifted_map(const EnvironmentModel& env, const DensityOperator& sigma);

/// N(rho) = Tr_LE{U (rho (x) sigma0) U^dag}.
QuantumChannel memoryless_map(const EnvironmentModel& env);

/// Phi_s^(n): U_1, E_tau1, U_2, ..., E_tau(n-1), U_n, then trace over the
/// LE. There is no relaxation after the last interaction. Carrier 1 is the
/// most significant tensor factor. Throws BudgetExceeded when
/// carrier_dim^(2n) > kMaxChoiDimension.
QuantumChannel compose_sequence(const EnvironmentModel& env, const CarrierSequence& s, int n);

/// compose_sequence with every relaxation replaced by the identity.
QuantumChannel perfect_memory_map(const EnvironmentModel& env, int n);

/// Map of one group of m = intra_intervals.size() + 1 carriers.
QuantumChannel grouped_map(const EnvironmentModel& env, std::span<const double> intra_intervals);

/// Propagates one n-carrier input through the joint carriers (x) LE state
/// without building the channel. Throws BudgetExceeded when
/// carrier_dim^n * env_dim > kMaxJointDimension.
DensityOperator evolve_sequence(const EnvironmentModel& env, const CarrierSequence& s,
                                const DensityOperator& input);

/// The blocks V_k when U = sum_k |k><k| (x) V_k (the carrier controls the LE
/// operation), otherwise nullopt.
std::optional<std::vector<ComplexMatrix>> controlled_blocks(const EnvironmentModel& env,
                                                            double tolerance = 1e-12);

/// The complex factor g when `channel` is a qubit channel that fixes the
/// computational-basis populations and maps |0><1| to g|0><1|.
std::optional<Complex> dephasing_factor(const QuantumChannel& channel,
                                        double tolerance = tol::kMapEquality);

}  // namespace memchan
