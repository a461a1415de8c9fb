#pragma once

// Sequence analytics, information measures and transmission rates.
// Entropies are in bits, rates in (qu)bits per unit time.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memchan/attenuation.hpp"
#include "memchan/channels.hpp"

namespace memchan {

// ---- sequences -------------------------------------------------------------

struct SequenceStats {
  double tau_prime = 0.0;         // minimum average first-neighbors distance
  double tau_double_prime = 0.0;  // maximum average first-neighbors distance
  bool regular = false;
  std::optional<double> tau_s;    // set iff regular
};

/// Periodic patterns give tau' = tau'' = pattern mean. A finite pattern of N
/// intervals uses the running means a_k = t_{k+1}/k over its tail half
/// (k >= ceil(N/2)): tau' = min a_k, tau'' = max a_k, regular when they agree
/// to 1e-12. Throws std::domain_error for an empty pattern.
SequenceStats sequence_stats(const CarrierSequence& s);

/// n_s(T): carriers entering strictly before T, with t_1 = 0 and
/// t_{j+1} = t_j + tau_j. Throws std::domain_error for a periodic pattern
/// whose intervals are all zero and T > 0 (unbounded count).
std::size_t count_carriers(const CarrierSequence& s, double t);

// ---- capacities of the dephasing instance ----------------------------------

/// Q(P_g) = 1 - H2(1/2 + g/2). Throws std::domain_error when |g| > 1.
double dephasing_quantum_capacity(double g);
/// C(P_g) = 1 for every g. Throws std::domain_error when |g| > 1.
double dephasing_classical_capacity(double g);

// ---- information measures ---------------------------------------------------

/// S(Phi(rho)) - S((Phi (x) I)(Psi_rho)) with the canonical purification.
/// Throws BudgetExceeded when dim_in * dim_out > kMaxChoiDimension.
double coherent_information(const QuantumChannel& channel, const DensityOperator& rho);

/// Same quantity from an explicit purification psi on system (x) reference
/// (system first); the input state is Tr_ref |psi><psi|.
double coherent_information(const QuantumChannel& channel, const PureState& psi, Index reference_dim);

/// Entropy exchange S(Phi^c(rho)), the entropy of the complementary output.
double entropy_exchange(const QuantumChannel& channel, const DensityOperator& rho);

/// S(Phi(rho)) - S(Phi^c(rho)); equals coherent_information but needs only
/// the Kraus-count-sized complementary output.
double coherent_information_complementary(const QuantumChannel& channel, const DensityOperator& rho);

struct Ensemble {
  std::vector<std::pair<double, DensityOperator>> items;

  /// Throws std::domain_error on negative weights or a total away from 1
  /// by more than 1e-12, DimensionMismatch on mixed dimensions.
  void validate() const;
};

/// S(Phi(sum p_k R_k)) - sum p_k S(Phi(R_k)), clipped at 0.
double holevo_information(const QuantumChannel& channel, const Ensemble& ensemble);

/// Uniform ensemble of the computational basis states.
Ensemble computational_basis_ensemble(Index dim);

struct OneShotResult {
  double value = 0.0;
  std::array<double, 3> bloch{0.0, 0.0, 0.0};  // maximizing input
};

/// Maximum of the coherent information over qubit inputs: 11^3 grid on the
/// Bloch ball, then pattern-search refinement. The result (clipped at 0)
/// lower-bounds Q. Throws DimensionMismatch unless dim_in == 2.
OneShotResult one_shot_q_search(const QuantumChannel& channel);
double one_shot_q_lower(const QuantumChannel& channel);

/// Lower bound on Q: exact formula when the channel is phase damping,
/// one_shot_q_lower for other qubit inputs, coherent information at the
/// maximally mixed input otherwise.
double quantum_capacity_lower(const QuantumChannel& channel);
/// Lower bound on C: 1 for phase damping, otherwise the Holevo information
/// of the computational-basis ensemble.
double classical_capacity_lower(const QuantumChannel& channel);

/// Coherent-information lower bounds J_1..J_max for groups of m carriers
/// spaced by `intra_tau`, starting from sigma0, at the maximally mixed input.
/// Requires a carrier-controlled coupling U = sum_k |k><k| (x) V_k, for which
/// S(output) = m log2 D exactly; the environment entropy is bounded by the
/// sum of its marginals (sigma0 purifier, relaxation ancillas, final LE),
/// all of which follow from the LE-marginal recursion
///   sigma -> E_tau((1/D) sum_k V_k sigma V_k^dag).
/// Throws std::invalid_argument for a non-controlled coupling.
std::vector<double> controlled_coherent_bounds(const EnvironmentModel& env, double intra_tau,
                                               int max_group);

// ---- rates -----------------------------------------------------------------

enum class RateRegime { kMemoryless, kPerfect, kGrouped, kAttenuation, kBound };

const char* regime_name(RateRegime regime);

/// Parameters of the configuration a report refers to.
struct RateConfig {
  int group_size = 1;  // carriers per group
  int b_carriers = 0;  // attenuation B carriers
  double tau = 0.0;    // intra-group or B-carrier spacing
  double p = 1.0;      // B-carrier population of |0>
};

struct RateReport {
  double r_q = 0.0;
  double r_c = 0.0;
  RateRegime regime = RateRegime::kMemoryless;
  double upper_bound = 0.0;
  RateConfig config;
};

/// capacity / tau_s. Throws std::domain_error unless tau_s > 0.
double rate_regular(double capacity, double tau_s);

struct RateInterval {
  double lower = 0.0;  // capacity / tau''
  double upper = 0.0;  // capacity / tau'
};
/// Bounds for a (possibly irregular) sequence; they coincide for regular ones.
RateInterval rate_interval(double capacity, const SequenceStats& stats);

/// Carriers spaced by tau_s >= tauE see N independently.
/// Throws std::domain_error when tau_s < tauE.
RateReport memoryless_rates(const EnvironmentModel& env, double tau_s);
/// Perfect memory: log2 D / tau_s for both rates.
RateReport perfect_memory_rates(Index carrier_dim, double tau_s);
/// Groups of m carriers spaced by tau inside a group and by max(tau, tauE)
/// between groups. Exact coherent information within the dense budget, the
/// controlled-coupling bound beyond it.
RateReport grouped_rates(const EnvironmentModel& env, int m, double tau);

/// r = Q(P_gbar)/(n tau + tauE), C = 1/(n tau + tauE).
RateReport rate_attenuation(const AttenuationProtocol& proto);

/// Gamma = [tauE/(n tau + tauE)] Q(P_gbar*)/Q(P_sqrt(lambda)), gbar* optimized
/// over p. Throws std::domain_error for lambda = 0 (Q(N) = 0).
double gamma_ratio(double lambda, int n, double tau, double tau_e = 1.0);

/// One row of a Gamma sweep.
struct GammaPoint {
  double lambda = 0.0;
  int n = 0;
  double tau_over_tau_e = 0.0;
  double p_star = 1.0;
  double gbar = 0.0;
  double g0 = 0.0;
  double gamma = 0.0;
  double rbar_q = 0.0;
  double r_q_s0 = 0.0;
};
GammaPoint gamma_point(double lambda, int n, double tau, double tau_e = 1.0);

struct RateSearchOptions {
  /// Largest group for the controlled-coupling bound.
  int max_group = 10000;
  /// Points of the B-carrier spacing grid on [tau_min, tauE].
  int tau_points = 9;
  /// Points of the B-carrier population grid on [0, 1].
  int p_points = 21;
};

/// Lower bound on the optimal rates under a minimum spacing tau_min: best of
/// (i) attenuation protocols with tau >= tau_min and n in [1, budget] and
/// (ii) groups of m carriers at spacing tau_min (exact maps within the dense
/// budget, the controlled bound up to options.max_group). r_q and r_c are
/// maximized separately; config describes the r_q optimum. Ties keep the
/// first candidate in (grouped m, then attenuation n, tau, p) order.
/// upper_bound = log2 D / tau_min. Throws std::domain_error unless tau_min > 0.
RateReport best_rate_search(double tau_min, const EnvironmentModel& env, int budget,
                            const RateSearchOptions& options = {});

}  // namespace memchan
