#pragma once

#include <vector>

#include "memchan/qcore.hpp"

namespace memchan {

/// Choi matrix C = sum_ij |i><j| (x) Phi(|i><j|), input factor first.
/// For a trace-preserving map Tr_out C = identity on the input.
struct ChoiMatrix {
  Index dim_in = 0;
  Index dim_out = 0;
  ComplexMatrix matrix;
};

/// Completely positive trace-preserving map in Kraus form.
class QuantumChannel {
 public:
  /// Throws DimensionMismatch on inconsistent shapes and InvalidState when
  /// sum K^dag K differs from the identity by more than 1e-12.
  QuantumChannel(Index dim_in, Index dim_out, std::vector<ComplexMatrix> kraus);

  static QuantumChannel identity(Index dim);
  /// Unitary conjugation rho -> U rho U^dag.
  static QuantumChannel unitary(const ComplexMatrix& u);

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  /// Applies the map to an arbitrary (not necessarily positive) operator.
  ComplexMatrix apply(const ComplexMatrix& op) const;
  DensityOperator apply(const DensityOperator& rho) const;

  /// max |sum K^dag K - I|.
  double completeness_error() const;

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<ComplexMatrix> kraus_;
};

double kraus_completeness_error(std::span<const ComplexMatrix> kraus, Index dim_in);

/// Kraus set with mutually Hilbert-Schmidt-orthogonal elements spanning the
/// same operator space; numerically vanishing elements are dropped. Leaves
/// the represented map unchanged.
std::vector<ComplexMatrix> compress_kraus(const std::vector<ComplexMatrix>& kraus);

/// a (x) b.
QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b);
/// second o first.
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

ChoiMatrix choi_of(const QuantumChannel& channel);

/// max absolute entry difference; throws DimensionMismatch on shape mismatch.
double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b);
double choi_distance(const QuantumChannel& a, const QuantumChannel& b);

/// Map equality through the Choi form (Kraus sets are never compared).
bool same_map(const QuantumChannel& a, const QuantumChannel& b,
              double tolerance = tol::kMapEquality);

/// Complementary-channel output rho_E[i][j] = Tr(K_i rho K_j^dag) for the
/// channel's Kraus set. Its entropy equals the entropy exchange.
ComplexMatrix complementary_output(const QuantumChannel& channel, const ComplexMatrix& rho);

}  // namespace memchan
