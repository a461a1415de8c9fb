#include "memchan/markov.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memchan {
namespace {

// (I (x) <bra|) U (I (x) |ket>) for an LE bra/ket in computational coordinates.
ComplexMatrix carrier_operator(const ComplexMatrix& u, Index d, const ComplexVector& bra,
                               const ComplexVector& ket) {
  const Index de = bra.size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index cp = 0; cp < d; ++cp) {
      Complex acc = 0.0;
      for (Index e = 0; e < de; ++e) {
        for (Index ep = 0; ep < de; ++ep) {
          acc += std::conj(bra(e)) * u(c * de + e, cp * de + ep) * ket(ep);
        }
      }
      out(c, cp) = acc;
    }
  }
  return out;
}

MarkovEntry make_entry(ComplexMatrix a, double scale) {
  MarkovEntry entry;
  entry.p = (a.adjoint() * a).trace().real() / scale;
  if (entry.p > kProbabilityFloor) entry.m = a / std::sqrt(entry.p);
  entry.a = std::move(a);
  return entry;
}

}  // namespace

void DecoherentRelaxation::validate() const {
  if (basis.empty()) throw InvalidState("decoherent relaxation needs a basis");
  const Index d = dim();
  if (static_cast<Index>(basis.size()) != d) throw InvalidState("basis must span the LE");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].dim() != d) throw DimensionMismatch("basis vectors differ in dimension");
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Complex overlap = basis[i].amplitudes().dot(basis[j].amplitudes());
      if (std::abs(overlap - (i == j ? 1.0 : 0.0)) > 1e-12) {
        throw InvalidState("decoherent basis is not orthonormal");
      }
    }
  }
  if (stationary_index >= basis.size()) throw InvalidState("stationary index out of range");
  if (!post_state) throw InvalidState("post-state function is empty");
  if (!(tau_e > 0.0)) throw std::domain_error("tauE must be positive");
}

QuantumChannel decoherent_channel(const DecoherentRelaxation& spec, double tau) {
  spec.validate();
  const Index d = spec.dim();
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(spec.basis.size());
  for (std::size_t l = 0; l < spec.basis.size(); ++l) {
    const PureState psi = spec.post_state(l, tau);
    if (psi.dim() != d) throw DimensionMismatch("post state has the wrong dimension");
    kraus.push_back(psi.amplitudes() * spec.basis[l].amplitudes().adjoint());
  }
  return QuantumChannel(d, d, std::move(kraus));
}

double decoherent_collapse_deviation(const DecoherentRelaxation& spec) {
  spec.validate();
  const auto& l0 = spec.basis[spec.stationary_index].amplitudes();
  double worst = 0.0;
  for (double f : {1.0, 2.0}) {
    for (std::size_t l = 0; l < spec.basis.size(); ++l) {
      const PureState psi = spec.post_state(l, f * spec.tau_e);
      worst = std::max(worst, std::abs(std::abs(l0.dot(psi.amplitudes())) - 1.0));
    }
  }
  return worst;
}

EnvironmentModel DecoherentEnvironment::to_environment() const {
  relaxation.validate();
  auto spec = relaxation;
  RelaxationFamily family = [spec](double tau) { return decoherent_channel(spec, tau); };
  return EnvironmentModel(carrier_dim, relaxation.dim(), coupling, std::move(family),
                          DensityOperator::from_pure(relaxation.basis[relaxation.stationary_index]),
                          relaxation.tau_e);
}

DecoherentRelaxation rotating_decoherent_relaxation(double tau_e) {
  DecoherentRelaxation spec;
  spec.basis = {PureState::basis(2, 0), PureState::basis(2, 1)};
  spec.stationary_index = 0;
  spec.tau_e = tau_e;
  spec.post_state = [tau_e](std::size_t l, double tau) {
    if (l == 0) return PureState::basis(2, 0);
    const double theta = 0.5 * std::numbers::pi * std::min(tau / tau_e, 1.0);
    ComplexVector v(2);
    v << std::sin(theta), std::cos(theta);
    return PureState::normalized(std::move(v));
  };
  return spec;
}

DecoherentRelaxation dephasing_decoherent_relaxation(Index env_dim, double tau_e) {
  DecoherentRelaxation spec;
  for (Index l = 0; l < env_dim; ++l) spec.basis.push_back(PureState::basis(env_dim, l));
  spec.stationary_index = 0;
  spec.tau_e = tau_e;
  spec.post_state = [env_dim, tau_e](std::size_t l, double tau) {
    return PureState::basis(env_dim, tau < tau_e ? static_cast<Index>(l) : 0);
  };
  return spec;
}

MarkovDecomposition markov_decompose(const DecoherentEnvironment& env, const CarrierSequence& s,
                                     int n, ProbabilityConvention convention) {
  try {
    env.relaxation.validate();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("relaxation is not decoherent: ") + e.what());
  }
  s.validate();
  if (n < 1) throw std::domain_error("markov_decompose needs n >= 1");
  const Index d = env.carrier_dim;
  const Index de = env.relaxation.dim();
  if (env.coupling.rows() != d * de || !is_unitary(env.coupling)) {
    throw InvalidState("coupling must be a unitary on carrier (x) LE");
  }
  const double scale = convention == ProbabilityConvention::kNormalized ? static_cast<double>(d) : 1.0;
  const auto& basis = env.relaxation.basis;
  const auto& l0 = basis[env.relaxation.stationary_index].amplitudes();

  MarkovDecomposition decomp;
  decomp.carrier_dim = d;
  decomp.env_dim = de;
  decomp.convention = convention;
  for (std::size_t l1 = 0; l1 < basis.size(); ++l1) {
    decomp.first.push_back(make_entry(carrier_operator(env.coupling, d, basis[l1].amplitudes(), l0), scale));
  }
  for (int j = 1; j < n; ++j) {
    const double tau = s.interval(static_cast<std::size_t>(j - 1));
    MarkovStep step;
    step.entries.resize(basis.size());
    for (std::size_t prev = 0; prev < basis.size(); ++prev) {
      const PureState psi = env.relaxation.post_state(prev, tau);
      for (std::size_t next = 0; next < basis.size(); ++next) {
        step.entries[next].push_back(
            make_entry(carrier_operator(env.coupling, d, basis[next].amplitudes(), psi.amplitudes()), scale));
      }
    }
    decomp.steps.push_back(std::move(step));
  }
  return decomp;
}

DensityOperator markov_reconstruct(const MarkovDecomposition& decomp, const DensityOperator& r) {
  const int n = decomp.carriers();
  const Index d = decomp.carrier_dim;
  Index dn = 1;
  for (int j = 0; j < n; ++j) dn *= d;
  if (r.dim() != dn) throw DimensionMismatch("input does not match the decomposed carriers");

  const auto de = static_cast<std::size_t>(decomp.env_dim);
  ComplexMatrix out = ComplexMatrix::Zero(dn, dn);
  std::vector<std::size_t> path(static_cast<std::size_t>(n), 0);

  // Depth-first enumeration of LE paths (l_1, ..., l_n) with running
  // operator and weight; branches with no M entry carry zero weight.
  std::function<void(int, double, const ComplexMatrix&)> walk =
      [&](int depth, double weight, const ComplexMatrix& op) {
        if (depth == n) {
          out.noalias() += weight * (op * r.matrix() * op.adjoint());
          return;
        }
        for (std::size_t l = 0; l < de; ++l) {
          const MarkovEntry& entry = depth == 0
                                         ? decomp.first[l]
                                         : decomp.steps[static_cast<std::size_t>(depth - 1)]
                                               .entries[l][path[static_cast<std::size_t>(depth - 1)]];
          if (!entry.m) continue;
          path[static_cast<std::size_t>(depth)] = l;
          walk(depth + 1, weight * entry.p, tensor(op, *entry.m));
        }
      };
  walk(0, 1.0, ComplexMatrix::Identity(1, 1));
  return DensityOperator(out);
}

MarkovDiagnostics markov_diagnostics(const MarkovDecomposition& decomp) {
  const double target =
      decomp.convention == ProbabilityConvention::kNormalized ? 1.0 : static_cast<double>(decomp.carrier_dim);
  MarkovDiagnostics diag;
  double first_sum = 0.0;
  for (const auto& e : decomp.first) first_sum += e.p;
  diag.first_normalization_error = std::abs(first_sum - target);
  for (const auto& step : decomp.steps) {
    const std::size_t de = step.entries.size();
    for (std::size_t prev = 0; prev < de; ++prev) {
      double row = 0.0;
      for (std::size_t next = 0; next < de; ++next) row += step.entries[next][prev].p;
      diag.row_normalization_error = std::max(diag.row_normalization_error, std::abs(row - target));
    }
    for (std::size_t next = 0; next < de; ++next) {
      double col = 0.0;
      for (std::size_t prev = 0; prev < de; ++prev) col += step.entries[next][prev].p;
      diag.max_column_sum = std::max(diag.max_column_sum, col);
    }
  }
  return diag;
}

}  // namespace memchan
