#include "memchan/attenuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace memchan {
namespace {

// Eigen-solutions closer than this to the unit circle are rejected.
constexpr double kSpectralMargin = 1e-9;

EnvironmentModel fixed_eta_environment(double lambda, double eta) {
  return qubit_dephasing_environment(lambda, 1.0, [eta](double, double) { return eta; });
}

std::vector<DensityOperator> trajectory(double p, double lambda, double eta, int n) {
  const std::array<double, 2> populations{p, 1.0 - p};
  return iterate_environment(fixed_eta_environment(lambda, eta), DensityOperator::diagonal(populations),
                             n, 0.0);
}

double gbar_of(const EnvironmentModel& env, const DensityOperator& sigma) {
  const auto g = dephasing_factor(lifted_map(env, sigma));
  if (!g) throw std::logic_error("modified map is not a phase damping channel");
  return g->real();
}

// Unit eigenvector of the symmetric 2x2 matrix `a` for eigenvalue `ev`.
// `preferred` is the closed-form direction, used when it is well defined.
Eigen::Vector2d eigenvector(const Eigen::Matrix2d& a, double ev, const Eigen::Vector2d& preferred,
                            const Eigen::Vector2d& fallback_axis) {
  const Eigen::Vector2d first(a(0, 1), ev - a(0, 0));
  const Eigen::Vector2d second(ev - a(1, 1), a(0, 1));
  const double scale = std::max({a.cwiseAbs().maxCoeff(), std::abs(ev), 1e-300});
  if (first.norm() >= second.norm() && first.norm() > 1e-12 * scale && preferred.norm() > 0.0) {
    return preferred.normalized();
  }
  if (second.norm() > 1e-12 * scale) return second.normalized();
  return fallback_axis;
}

}  // namespace

void AttenuationProtocol::validate() const {
  std::ostringstream msg;
  if (n < 0) msg << "n must be >= 0";
  else if (!(tau > 0.0)) msg << "tau must be positive";
  else if (!(tau_e > 0.0)) msg << "tauE must be positive";
  else if (!(p >= 0.0 && p <= 1.0)) msg << "p = " << p << " is outside [0, 1]";
  else if (!(lambda >= 0.0 && lambda <= 1.0)) msg << "lambda = " << lambda << " is outside [0, 1]";
  if (!msg.str().empty()) throw std::domain_error(msg.str());
}

double AttenuationProtocol::eta() const { return eta_profile(tau, tau_e); }

EnvPoint bloch_parameters(const DensityOperator& sigma) {
  if (sigma.dim() != 2) throw DimensionMismatch("LE parameterization needs a qubit");
  const ComplexMatrix& m = sigma.matrix();
  return {m(0, 1).real(), m(0, 1).imag(), m(1, 1).real()};
}

std::vector<DensityOperator> iterate_environment(const EnvironmentModel& env,
                                                 const DensityOperator& rho0, int n, double tau) {
  if (n < 0) throw std::domain_error("n must be >= 0");
  if (rho0.dim() != env.carrier_dim()) throw DimensionMismatch("rho0 must be a carrier state");
  const std::array<Index, 2> dims{env.carrier_dim(), env.env_dim()};
  const std::array<Index, 1> keep_le{1};
  const ComplexMatrix& u = env.coupling();
  const QuantumChannel relax = env.relaxation(tau);

  std::vector<DensityOperator> out{env.sigma0()};
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix joint = u * tensor(rho0.matrix(), out.back().matrix()) * u.adjoint();
    out.push_back(DensityOperator(relax.apply(partial_trace(joint, dims, keep_le))));
  }
  return out;
}

EnvTrajectory iterate_environment(const AttenuationProtocol& proto) {
  proto.validate();
  EnvTrajectory t;
  for (const auto& sigma : trajectory(proto.p, proto.lambda, proto.eta(), proto.n)) {
    t.points.push_back(bloch_parameters(sigma));
  }
  return t;
}

QuantumChannel modified_map(const AttenuationProtocol& proto) {
  proto.validate();
  const auto sigmas = trajectory(proto.p, proto.lambda, proto.eta(), proto.n);
  return lifted_map(qubit_dephasing_environment(proto.lambda, proto.tau_e), sigmas.back());
}

double iterated_gbar(double p, double lambda, double eta, int n) {
  const auto env = fixed_eta_environment(lambda, eta);
  const std::array<double, 2> populations{p, 1.0 - p};
  const auto sigmas = iterate_environment(env, DensityOperator::diagonal(populations), n, 0.0);
  return gbar_of(env, sigmas.back());
}

double iterated_gbar(const AttenuationProtocol& proto) {
  proto.validate();
  return iterated_gbar(proto.p, proto.lambda, proto.eta(), proto.n);
}

AttenuationRecursion attenuation_recursion(double p, double lambda, double eta) {
  const double ab = std::sqrt(lambda * (1.0 - lambda));
  const double q = std::sqrt(std::sqrt(eta));  // eta^(1/4)
  const double s = std::sqrt(eta);
  AttenuationRecursion r;
  // (1-p)(p/(1-p) -/+ ...) written without dividing by 1-p.
  r.a(0, 0) = eta * (p - (1.0 - p) * (1.0 - 2.0 * lambda));
  r.a(1, 1) = s * (p + (1.0 - p) * (1.0 - 2.0 * lambda));
  r.a(0, 1) = r.a(1, 0) = -2.0 * s * q * (1.0 - p) * ab;
  r.w(0) = (1.0 - p) * s * q * (1.0 - lambda);
  r.w(1) = (1.0 - p) * s * ab;
  return r;
}

std::optional<ClosedFormSolution> closed_form_solution(double p, double lambda, double eta, int n) {
  if (n < 0) throw std::domain_error("n must be >= 0");
  const double s = std::sqrt(eta);
  const double q = std::sqrt(s);
  const double ab = std::sqrt(lambda * (1.0 - lambda));
  const double mix = (1.0 - p) * (1.0 - 2.0 * lambda);

  const double b = (1.0 + s) * p + (1.0 - s) * mix;
  const double delta = std::sqrt(std::max(0.0, 4.0 * s * (1.0 - 2.0 * p) + b * b));

  ClosedFormSolution sol;
  sol.lambda_plus = 0.5 * s * (b + delta);
  sol.lambda_minus = 0.5 * s * (b - delta);
  if (std::abs(sol.lambda_plus) >= 1.0 - kSpectralMargin ||
      std::abs(sol.lambda_minus) >= 1.0 - kSpectralMargin) {
    return std::nullopt;
  }

  const auto rec = attenuation_recursion(p, lambda, eta);
  const double alpha = 4.0 * q * (1.0 - p) * ab;
  const double beta_base = (s - 1.0) * p - mix * (1.0 + s);
  const Eigen::Vector2d preferred_plus(alpha, beta_base - delta);
  const Eigen::Vector2d preferred_minus(alpha, beta_base + delta);
  sol.vec_plus = eigenvector(rec.a, sol.lambda_plus, preferred_plus, Eigen::Vector2d::UnitX());
  sol.vec_minus = eigenvector(rec.a, sol.lambda_minus, preferred_minus, Eigen::Vector2d::UnitY());
  if (std::abs(sol.vec_plus.dot(sol.vec_minus)) > 1e-6) {
    // Degenerate or diagonal spectrum: any orthonormal pair works.
    sol.vec_minus = Eigen::Vector2d(-sol.vec_plus(1), sol.vec_plus(0));
  }

  auto geometric = [n](double l) {
    return n == 0 ? 0.0 : (1.0 - std::pow(l, n)) / (1.0 - l);
  };
  const double xi_p = geometric(sol.lambda_plus);
  const double xi_m = geometric(sol.lambda_minus);
  const auto& vp = sol.vec_plus;
  const auto& vm = sol.vec_minus;
  const double u = xi_p * vp(0) * vp(0) + xi_m * vm(0) * vm(0);
  const double v = xi_p * vp(1) * vp(1) + xi_m * vm(1) * vm(1);
  const double t = xi_p * vp(0) * vp(1) + xi_m * vm(0) * vm(1);

  sol.z_n = s * q * (1.0 - p) * (q * (1.0 - lambda) * u + ab * t);
  sol.x_n = s * (1.0 - p) * (q * (1.0 - lambda) * t + ab * v);
  sol.gbar = std::sqrt(lambda) - 2.0 * (std::sqrt(lambda) * sol.z_n - std::sqrt(1.0 - lambda) * sol.x_n);
  return sol;
}

std::optional<double> closed_form_gbar(const AttenuationProtocol& proto) {
  proto.validate();
  const auto sol = closed_form_solution(proto.p, proto.lambda, proto.eta(), proto.n);
  if (!sol) return std::nullopt;
  return sol->gbar;
}

double attenuated_gbar(const AttenuationProtocol& proto) {
  if (auto g = closed_form_gbar(proto)) return *g;
  return iterated_gbar(proto);
}

GbarOptimum optimize_gbar(double lambda, int n, double tau, double tau_e) {
  AttenuationProtocol proto{n, tau, 1.0, lambda, tau_e};
  proto.validate();
  auto value = [&](double p) {
    proto.p = std::clamp(p, 0.0, 1.0);
    return attenuated_gbar(proto);
  };

  constexpr int kGrid = 100;
  GbarOptimum best{1.0, value(1.0)};
  int best_index = kGrid;
  for (int i = kGrid; i >= 0; --i) {
    const double p = static_cast<double>(i) / kGrid;
    const double g = value(p);
    if (g > best.gbar) {
      best = {p, g};
      best_index = i;
    }
  }

  double lo = static_cast<double>(std::max(best_index - 1, 0)) / kGrid;
  double hi = static_cast<double>(std::min(best_index + 1, kGrid)) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = value(c);
  double fd = value(d);
  while (hi - lo > 1e-6) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = value(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = value(d);
    }
  }
  const double p_mid = 0.5 * (lo + hi);
  const double g_mid = value(p_mid);
  if (g_mid > best.gbar) best = {p_mid, g_mid};
  return best;
}

}  // namespace memchan
