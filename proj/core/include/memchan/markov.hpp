#pragma once

// Markovian Kraus decomposition of the sequence map for decoherent
// relaxation families,
//
//   E_tau(|l><l'|) = delta_ll' |psi_l(tau)><psi_l(tau)|,
//
// where the LE forgets its coherences in the basis {|l>} between carriers.
// The n-carrier map then becomes a sum over LE paths (l_1, ..., l_n) of
// products of single-carrier operators weighted by a Markov chain.

#include <functional>
#include <optional>
#include <vector>

#include "memchan/channels.hpp"

namespace memchan {

inline constexpr double kProbabilityFloor = 1e-14;

/// Decoherent LE process: post_state(l, tau) is |psi_l(tau)>, expressed in
/// the computational coordinates of the LE. `basis` must be orthonormal and
/// post_state(l, tau >= tauE) must equal basis[stationary_index].
struct DecoherentRelaxation {
  std::vector<PureState> basis;
  std::function<PureState(std::size_t l, double tau)> post_state;
  std::size_t stationary_index = 0;
  double tau_e = 1.0;

  Index dim() const { return basis.empty() ? 0 : basis.front().dim(); }
  /// Throws InvalidState if the basis is not orthonormal or the index is bad.
  void validate() const;
};

/// Kraus operators |psi_l(tau)><l|, l over the basis.
QuantumChannel decoherent_channel(const DecoherentRelaxation& spec, double tau);

/// max over l of | |<psi_l(tau)|l0>| - 1 | at tau = tauE and 2 tauE.
double decoherent_collapse_deviation(const DecoherentRelaxation& spec);

/// Carrier coupling plus a decoherent relaxation; sigma0 = |l0><l0|.
struct DecoherentEnvironment {
  Index carrier_dim = 2;
  ComplexMatrix coupling;
  DecoherentRelaxation relaxation;

  EnvironmentModel to_environment() const;
};

/// Qubit LE with |psi_0> = |0> and |psi_1(tau)> = cos(theta)|1> + sin(theta)|0>,
/// theta = (pi/2) min(tau/tauE, 1); stationary state |0>.
DecoherentRelaxation rotating_decoherent_relaxation(double tau_e = 1.0);
/// psi_l(tau) = |l> for tau < tauE (pure dephasing), |0> afterwards.
DecoherentRelaxation dephasing_decoherent_relaxation(Index env_dim, double tau_e = 1.0);

enum class ProbabilityConvention {
  /// p = Tr{A^dag A} / D, so conditional distributions sum to one.
  kNormalized,
  /// p = Tr{A^dag A}; sums equal the carrier dimension D.
  kUnnormalized,
};

/// Operator, its probability, and A / sqrt(p) (absent when p <= floor).
struct MarkovEntry {
  ComplexMatrix a;
  double p = 0.0;
  std::optional<ComplexMatrix> m;
};

/// One transition step j -> j+1; entries[next][previous].
struct MarkovStep {
  std::vector<std::vector<MarkovEntry>> entries;
};

struct MarkovDecomposition {
  Index carrier_dim = 0;
  Index env_dim = 0;
  ProbabilityConvention convention = ProbabilityConvention::kNormalized;
  /// A_{l1} = <l1|U|l0>, indexed by l1.
  std::vector<MarkovEntry> first;
  /// A_{l_{j+1}, l_j} = <l_{j+1}|U|psi_{l_j}(tau_j)>, one step per j = 1..n-1.
  std::vector<MarkovStep> steps;

  int carriers() const { return static_cast<int>(steps.size()) + 1; }
};

/// Builds the A, p and M tables for the first n carriers of `s`.
/// Throws std::invalid_argument when the relaxation is not decoherent.
MarkovDecomposition markov_decompose(const DecoherentEnvironment& env, const CarrierSequence& s,
                                     int n,
                                     ProbabilityConvention convention = ProbabilityConvention::kNormalized);

/// sum over paths of p^(1) p^(2) ... (M (x) M (x) ...) R (...)^dag.
/// Throws DimensionMismatch unless R lives on the decomposition's carriers.
DensityOperator markov_reconstruct(const MarkovDecomposition& decomp, const DensityOperator& r);

/// Normalization diagnostics of the transition tables.
struct MarkovDiagnostics {
  /// max over steps and l_j of |sum_{l_{j+1}} p - target| (target 1 or D).
  double row_normalization_error = 0.0;
  /// |sum_{l1} p^(1) - target|.
  double first_normalization_error = 0.0;
  /// max over steps and l_{j+1} of sum_{l_j} p (reported, not enforced).
  double max_column_sum = 0.0;
};
MarkovDiagnostics markov_diagnostics(const MarkovDecomposition& decomp);

}  // namespace memchan
