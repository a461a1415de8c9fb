#include "memchan/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace memchan {
namespace {

Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

// Splits every full index into (selected-factor index, remaining-factor
// index), both in mixed radix with the first factor most significant.
struct IndexSplit {
  std::vector<Index> selected;
  std::vector<Index> rest;
  Index selected_dim = 1;
  Index rest_dim = 1;
};

IndexSplit split_indices(std::span<const Index> dims, std::span<const Index> selected) {
  const auto nfactors = static_cast<Index>(dims.size());
  std::vector<bool> is_selected(dims.size(), false);
  for (Index s : selected) {
    if (s < 0 || s >= nfactors) {
      throw DimensionMismatch("subsystem index out of range");
    }
    if (is_selected[static_cast<std::size_t>(s)]) {
      throw DimensionMismatch("subsystem listed twice");
    }
    is_selected[static_cast<std::size_t>(s)] = true;
  }

  IndexSplit split;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (!is_selected[f]) split.rest_dim *= dims[f];
  }
  for (Index s : selected) split.selected_dim *= dims[static_cast<std::size_t>(s)];

  const Index total = product(dims);
  split.selected.resize(static_cast<std::size_t>(total));
  split.rest.resize(static_cast<std::size_t>(total));
  std::vector<Index> digits(dims.size());
  for (Index i = 0; i < total; ++i) {
    Index rem = i;
    for (std::size_t f = dims.size(); f-- > 0;) {
      digits[f] = rem % dims[f];
      rem /= dims[f];
    }
    Index sel = 0;
    for (Index s : selected) {
      sel = sel * dims[static_cast<std::size_t>(s)] + digits[static_cast<std::size_t>(s)];
    }
    Index rest = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (!is_selected[f]) rest = rest * dims[f] + digits[f];
    }
    split.selected[static_cast<std::size_t>(i)] = sel;
    split.rest[static_cast<std::size_t>(i)] = rest;
  }
  return split;
}

// full[rest][sel] = full index.
std::vector<std::vector<Index>> regroup(const IndexSplit& split) {
  std::vector<std::vector<Index>> full(static_cast<std::size_t>(split.rest_dim),
                                       std::vector<Index>(static_cast<std::size_t>(split.selected_dim)));
  for (std::size_t i = 0; i < split.selected.size(); ++i) {
    full[static_cast<std::size_t>(split.rest[i])][static_cast<std::size_t>(split.selected[i])] =
        static_cast<Index>(i);
  }
  return full;
}

Complex gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw InvalidState("pure state of dimension zero");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::kPureNorm) {
    std::ostringstream msg;
    msg << "pure state norm " << norm << " differs from 1";
    throw InvalidState(msg.str());
  }
}

PureState PureState::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) throw DimensionMismatch("basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::normalized(ComplexVector v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvalidState("cannot normalize a zero vector");
  v /= norm;
  return PureState(std::move(v));
}

std::string density_violation(const ComplexMatrix& m) {
  std::ostringstream msg;
  if (m.rows() != m.cols() || m.rows() == 0) {
    msg << "matrix is " << m.rows() << "x" << m.cols() << ", not square";
    return msg.str();
  }
  if (!m.allFinite()) return "matrix has non-finite entries";
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::kHermitian) {
    msg << "not Hermitian (deviation " << herm << ")";
    return msg.str();
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol::kTrace) {
    msg << "trace " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i differs from 1";
    return msg.str();
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double min_eig = hermitian_eigenvalues(h).minCoeff();
  if (min_eig < -tol::kPositivity) {
    msg << "negative eigenvalue " << min_eig;
    return msg.str();
  }
  return {};
}

DensityOperator::DensityOperator(const ComplexMatrix& matrix) {
  if (auto why = density_violation(matrix); !why.empty()) {
    throw InvalidState("invalid density operator: " + why);
  }
  matrix_ = 0.5 * (matrix + matrix.adjoint());
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  if (dim <= 0) throw DimensionMismatch("dimension must be positive");
  return DensityOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::basis(Index dim, Index k) {
  return from_pure(PureState::basis(dim, k));
}

DensityOperator DensityOperator::diagonal(std::span<const double> probabilities) {
  const auto dim = static_cast<Index>(probabilities.size());
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) m(k, k) = probabilities[static_cast<std::size_t>(k)];
  return DensityOperator(m);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(tensor(a.matrix(), b.matrix()));
}

PureState tensor(const PureState& a, const PureState& b) {
  return PureState::normalized(Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval());
}

ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const Index> dims,
                            std::span<const Index> keep) {
  if (op.rows() != op.cols() || product(dims) != op.rows()) {
    throw DimensionMismatch("partial_trace: factor dimensions do not match the operator");
  }
  if (!std::is_sorted(keep.begin(), keep.end())) {
    throw DimensionMismatch("partial_trace: kept subsystems must be increasing");
  }
  const auto split = split_indices(dims, keep);
  const auto full = regroup(split);
  const Index d = split.selected_dim;
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& block : full) {
    for (Index r = 0; r < d; ++r) {
      const Index i = block[static_cast<std::size_t>(r)];
      for (Index c = 0; c < d; ++c) {
        out(r, c) += op(i, block[static_cast<std::size_t>(c)]);
      }
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> dims,
                              std::span<const Index> keep) {
  return DensityOperator(partial_trace(rho.matrix(), dims, keep));
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const Index> dims,
                             std::span<const Index> targets) {
  const auto split = split_indices(dims, targets);
  if (op.rows() != split.selected_dim || op.cols() != split.selected_dim) {
    throw DimensionMismatch("embed_operator: operator does not match target dimensions");
  }
  const auto full = regroup(split);
  const Index total = product(dims);
  const Index d = split.selected_dim;
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (const auto& block : full) {
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        out(block[static_cast<std::size_t>(r)], block[static_cast<std::size_t>(c)]) = op(r, c);
      }
    }
  }
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double p : eigenvalues) {
    p = std::clamp(p, 0.0, 1.0);
    if (p < tol::kEntropyCutoff) continue;
    s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

double von_neumann_entropy(const DensityOperator& rho) {
  return entropy_of_spectrum(hermitian_eigenvalues(rho.matrix()));
}

double binary_entropy(double x) {
  x = std::clamp(x, 0.0, 1.0);
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double fidelity(const PureState& psi, const DensityOperator& rho) {
  if (psi.dim() != rho.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

PureState purify(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix());
  const Index d = rho.dim();
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (Index k = 0; k < d; ++k) {
    const double p = std::max(solver.eigenvalues()(k), 0.0);
    if (p == 0.0) continue;
    const double amp = std::sqrt(p);
    for (Index s = 0; s < d; ++s) {
      psi(s * d + k) += amp * solver.eigenvectors()(s, k);
    }
  }
  return PureState::normalized(std::move(psi));
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("trace_distance: shape mismatch");
  }
  const ComplexMatrix diff = a - b;
  const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (diff + diff.adjoint()));
  return 0.5 * ev.cwiseAbs().sum();
}

double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("max_abs_difference: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& u, double tolerance) {
  if (u.rows() != u.cols()) return false;
  const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
  return max_abs_difference(u.adjoint() * u, id) <= tolerance;
}

PureState random_pure_state(Index dim, std::mt19937_64& rng) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = gaussian(rng);
  return PureState::normalized(std::move(v));
}

DensityOperator random_density(Index dim, std::mt19937_64& rng) {
  ComplexMatrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) g(i, j) = gaussian(rng);
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(rho);
}

ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  ComplexMatrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) g(i, j) = gaussian(rng);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace memchan
