#pragma once

// Dense complex linear algebra and quantum-information primitives for
// small Hilbert spaces (total dimension up to a few thousand).

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace memchan {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kMapEquality = 1e-10;
inline constexpr double kKrausCompleteness = 1e-12;
inline constexpr double kUnitarity = 1e-12;
inline constexpr double kPureNorm = 1e-12;
/// Eigenvalues below this contribute nothing to the von Neumann entropy.
inline constexpr double kEntropyCutoff = 1e-12;
}  // namespace tol

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unit-norm state vector.
class PureState {
 public:
  /// Throws InvalidState if the norm differs from one by more than 1e-12.
  explicit PureState(ComplexVector amplitudes);

  /// Computational basis vector |k> in dimension `dim`.
  static PureState basis(Index dim, Index k);
  /// Normalizes `v` first; throws InvalidState for a zero vector.
  static PureState normalized(ComplexVector v);

  Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityOperator {
 public:
  /// Validates hermiticity, trace and positivity against the shared
  /// tolerances and stores the hermitian part. Throws InvalidState.
  explicit DensityOperator(const ComplexMatrix& matrix);

  static DensityOperator from_pure(const PureState& psi);
  static DensityOperator maximally_mixed(Index dim);
  static DensityOperator basis(Index dim, Index k);
  /// diag(probabilities); throws InvalidState unless they form a distribution.
  static DensityOperator diagonal(std::span<const double> probabilities);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Describes why `m` is not a density operator, or returns an empty string.
std::string density_violation(const ComplexMatrix& m);

/// Kronecker product; dimensions multiply.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor(std::span<const ComplexMatrix> factors);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
PureState tensor(const PureState& a, const PureState& b);

/// Traces out every factor not listed in `keep`. `dims` lists the factor
/// dimensions in tensor order; `keep` must be strictly increasing.
ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const Index> dims,
                            std::span<const Index> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> dims,
                              std::span<const Index> keep);

/// Embeds `op`, acting on the factors `targets` (in that order), into the
/// full space described by `dims`, padding with identities.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const Index> dims,
                             std::span<const Index> targets);

/// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& h);

/// -sum p log2 p over eigenvalues clipped to [0, 1]; 0 log 0 = 0.
double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues);

/// S(rho) = -Tr rho log2 rho, in bits.
double von_neumann_entropy(const DensityOperator& rho);

/// H2(x) = -x log2 x - (1-x) log2 (1-x); x is clipped to [0, 1].
double binary_entropy(double x);

/// <psi| rho |psi>.
double fidelity(const PureState& psi, const DensityOperator& rho);

/// Canonical purification sum_k sqrt(p_k) |e_k> (x) |k>_anc from the
/// eigendecomposition; the system factor comes first.
PureState purify(const DensityOperator& rho);

/// (1/2) || a - b ||_1 for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |a_ij - b_ij|; throws DimensionMismatch for different shapes.
double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_unitary(const ComplexMatrix& u, double tolerance = tol::kUnitarity);

/// Haar-like random pure state (normalized complex Gaussian vector).
PureState random_pure_state(Index dim, std::mt19937_64& rng);
/// Random full-rank density operator G G^dag / Tr, G complex Ginibre.
DensityOperator random_density(Index dim, std::mt19937_64& rng);
/// Random unitary from the QR decomposition of a Ginibre matrix.
ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng);

}  // namespace memchan
