#pragma once

// Independent reference computations used by the tests. Everything here is
// written with explicit index loops and shares no code with the library
// beyond the plain matrix types.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Traces out the second factor of a (da*db)-dimensional operator.
inline Matrix trace_second(const Matrix& m, Eigen::Index da, Eigen::Index db) {
  Matrix out = Matrix::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

/// Traces out the first factor.
inline Matrix trace_first(const Matrix& m, Eigen::Index da, Eigen::Index db) {
  Matrix out = Matrix::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

/// Applies a Kraus set.
inline Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

/// Choi matrix sum_ij |i><j| (x) Phi(|i><j|) by definition.
inline Matrix choi(const std::vector<Matrix>& kraus, Eigen::Index din) {
  const Eigen::Index dout = kraus.front().rows();
  Matrix out = Matrix::Zero(din * dout, din * dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      Matrix e = Matrix::Zero(din, din);
      e(i, j) = 1.0;
      const Matrix img = apply_kraus(kraus, e);
      for (Eigen::Index a = 0; a < dout; ++a)
        for (Eigen::Index b = 0; b < dout; ++b) out(i * dout + a, j * dout + b) = img(a, b);
    }
  }
  return out;
}

inline double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// -sum p log2 p of a Hermitian matrix.
inline double entropy(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-14) s -= p * std::log2(p);
  }
  return s;
}

inline double h2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// The attenuation recursion on (z, x) written out as scalars.
inline std::pair<double, double> scalar_attenuation(double p, double lambda, double eta, int n) {
  const double a = std::sqrt(lambda);
  const double b = std::sqrt(1.0 - lambda);
  double z = 0.0;
  double x = 0.0;
  for (int j = 0; j < n; ++j) {
    const double zp = z * (p + (1.0 - p) * (2.0 * lambda - 1.0)) + (1.0 - p) * (1.0 - lambda) -
                      2.0 * (1.0 - p) * a * b * x;
    const double xp = x * (p + (1.0 - p) * (1.0 - 2.0 * lambda)) + (1.0 - p) * a * b -
                      2.0 * (1.0 - p) * a * b * z;
    z = eta * zp;
    x = std::sqrt(eta) * xp;
  }
  return {z, x};
}

inline double scalar_gbar(double p, double lambda, double eta, int n) {
  const auto [z, x] = scalar_attenuation(p, lambda, eta, n);
  return std::sqrt(lambda) - 2.0 * (std::sqrt(lambda) * z - std::sqrt(1.0 - lambda) * x);
}

/// Applies `u` to factors (f, last) of a product space whose last factor is
/// the environment; dims lists every factor.
inline Matrix apply_on_pair(const Matrix& state, const std::vector<Eigen::Index>& dims, std::size_t f,
                            const Matrix& u) {
  const std::size_t last = dims.size() - 1;
  Eigen::Index total = 1;
  for (auto d : dims) total *= d;
  Matrix full = Matrix::Zero(total, total);
  std::vector<Eigen::Index> digits(dims.size());
  for (Eigen::Index row = 0; row < total; ++row) {
    Eigen::Index r = row;
    for (std::size_t k = dims.size(); k-- > 0;) {
      digits[k] = r % dims[k];
      r /= dims[k];
    }
    for (Eigen::Index cf = 0; cf < dims[f]; ++cf) {
      for (Eigen::Index ce = 0; ce < dims[last]; ++ce) {
        auto col_digits = digits;
        col_digits[f] = cf;
        col_digits[last] = ce;
        Eigen::Index col = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) col = col * dims[k] + col_digits[k];
        full(row, col) = u(digits[f] * dims[last] + digits[last], cf * dims[last] + ce);
      }
    }
  }
  return full * state * full.adjoint();
}

/// Applies a Kraus set to the last factor.
inline Matrix apply_on_last(const Matrix& state, Eigen::Index rest, const std::vector<Matrix>& kraus) {
  Matrix out = Matrix::Zero(state.rows(), state.cols());
  for (const auto& k : kraus) {
    const Matrix full = kron(Matrix::Identity(rest, rest), k);
    out += full * state * full.adjoint();
  }
  return out;
}

}  // namespace oracle
