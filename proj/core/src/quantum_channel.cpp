#include "memchan/quantum_channel.hpp"

#include <sstream>

namespace memchan {
namespace {

// Column-major vectorization: vec(K)[i * dim_out + a] = K(a, i).
ComplexVector vec(const ComplexMatrix& k) {
  return Eigen::Map<const ComplexVector>(k.data(), k.size());
}

ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols) {
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

}  // namespace

double kraus_completeness_error(std::span<const ComplexMatrix> kraus, Index dim_in) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim_in, dim_in);
  for (const auto& k : kraus) sum.noalias() += k.adjoint() * k;
  return max_abs_difference(sum, ComplexMatrix::Identity(dim_in, dim_in));
}

QuantumChannel::QuantumChannel(Index dim_in, Index dim_out, std::vector<ComplexMatrix> kraus)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
  if (dim_in_ <= 0 || dim_out_ <= 0) throw DimensionMismatch("channel dimensions must be positive");
  if (kraus_.empty()) throw InvalidState("channel needs at least one Kraus operator");
  for (const auto& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw DimensionMismatch("Kraus operator shape does not match channel dimensions");
    }
  }
  const double err = completeness_error();
  if (!(err <= tol::kKrausCompleteness)) {
    std::ostringstream msg;
    msg << "Kraus operators are not trace preserving (deviation " << err << ")";
    throw InvalidState(msg.str());
  }
}

QuantumChannel QuantumChannel::identity(Index dim) {
  return QuantumChannel(dim, dim, {ComplexMatrix::Identity(dim, dim)});
}

QuantumChannel QuantumChannel::unitary(const ComplexMatrix& u) {
  if (!is_unitary(u)) throw InvalidState("operator is not unitary");
  return QuantumChannel(u.cols(), u.rows(), {u});
}

ComplexMatrix QuantumChannel::apply(const ComplexMatrix& op) const {
  if (op.rows() != dim_in_ || op.cols() != dim_in_) {
    throw DimensionMismatch("channel input dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_out_, dim_out_);
  for (const auto& k : kraus_) out.noalias() += k * op * k.adjoint();
  return out;
}

DensityOperator QuantumChannel::apply(const DensityOperator& rho) const {
  return DensityOperator(apply(rho.matrix()));
}

double QuantumChannel::completeness_error() const {
  return kraus_completeness_error(kraus_, dim_in_);
}

std::vector<ComplexMatrix> compress_kraus(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.size() <= 1) return kraus;
  const Index rows = kraus.front().rows();
  const Index cols = kraus.front().cols();
  const auto n = static_cast<Index>(kraus.size());

  ComplexMatrix stacked(rows * cols, n);
  for (Index k = 0; k < n; ++k) stacked.col(k) = vec(kraus[static_cast<std::size_t>(k)]);

  const ComplexMatrix gram = stacked.adjoint() * stacked;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  const ComplexMatrix rotated = stacked * solver.eigenvectors();

  // Dropped elements carry Hilbert-Schmidt weight below 1e-20, far under the
  // completeness tolerance.
  constexpr double kDropWeight = 1e-20;
  std::vector<ComplexMatrix> out;
  for (Index k = n; k-- > 0;) {
    if (solver.eigenvalues()(k) <= kDropWeight) continue;
    out.push_back(unvec(rotated.col(k), rows, cols));
  }
  if (out.empty()) out.push_back(ComplexMatrix::Zero(rows, cols));
  return out;
}

QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus()) {
    for (const auto& kb : b.kraus()) kraus.push_back(tensor(ka, kb));
  }
  return QuantumChannel(a.dim_in() * b.dim_in(), a.dim_out() * b.dim_out(), std::move(kraus));
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (second.dim_in() != first.dim_out()) throw DimensionMismatch("compose: dimension mismatch");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(first.kraus().size() * second.kraus().size());
  for (const auto& k2 : second.kraus()) {
    for (const auto& k1 : first.kraus()) kraus.push_back(k2 * k1);
  }
  return QuantumChannel(first.dim_in(), second.dim_out(), compress_kraus(kraus));
}

ChoiMatrix choi_of(const QuantumChannel& channel) {
  const Index d = channel.dim_in() * channel.dim_out();
  ChoiMatrix choi{channel.dim_in(), channel.dim_out(), ComplexMatrix::Zero(d, d)};
  for (const auto& k : channel.kraus()) {
    const ComplexVector w = vec(k);
    // vec index i * dim_out + a matches the |i>|a> ordering of the Choi matrix.
    choi.matrix.noalias() += w * w.adjoint();
  }
  return choi;
}

double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out) {
    throw DimensionMismatch("choi_distance: channels act on different spaces");
  }
  return max_abs_difference(a.matrix, b.matrix);
}

double choi_distance(const QuantumChannel& a, const QuantumChannel& b) {
  return choi_distance(choi_of(a), choi_of(b));
}

bool same_map(const QuantumChannel& a, const QuantumChannel& b, double tolerance) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) return false;
  return choi_distance(a, b) < tolerance;
}

ComplexMatrix complementary_output(const QuantumChannel& channel, const ComplexMatrix& rho) {
  const auto n = static_cast<Index>(channel.kraus().size());
  std::vector<ComplexMatrix> k_rho;
  k_rho.reserve(channel.kraus().size());
  for (const auto& k : channel.kraus()) k_rho.push_back(k * rho);
  ComplexMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      // Tr(K_i rho K_j^dag) = sum_ab (K_i rho)_ab conj((K_j)_ab)
      out(i, j) = (k_rho[static_cast<std::size_t>(i)].array() *
                   channel.kraus()[static_cast<std::size_t>(j)].array().conjugate())
                      .sum();
    }
  }
  return out;
}

}  // namespace memchan
