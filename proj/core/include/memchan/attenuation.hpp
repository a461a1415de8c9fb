#pragma once

// Noise attenuation for the qubit dephasing model: n "B" carriers in the
// state rho0 = diag(p, 1-p), spaced by tau, steer the LE into sigma_n before
// the information-bearing "A" carrier arrives. The A carrier then sees the
// phase damping channel P_gbar instead of P_sqrt(lambda).

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "memchan/channels.hpp"

namespace memchan {

struct AttenuationProtocol {
  int n = 0;
  double tau = 0.5;
  double p = 1.0;
  double lambda = 1.0;
  double tau_e = 1.0;

  /// Throws std::domain_error for n < 0, tau <= 0, tauE <= 0 or p, lambda
  /// outside [0, 1].
  void validate() const;
  double eta() const;
};

/// LE parameterization sigma = [[1-z, x+iy], [x-iy, z]].
struct EnvPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct EnvTrajectory {
  std::vector<EnvPoint> points;  // sigma_0 ... sigma_n
};

EnvPoint bloch_parameters(const DensityOperator& sigma);

/// sigma_{j+1} = E_tau(Tr_C{U (rho0 (x) sigma_j) U^dag}), j = 0..n-1, from
/// sigma_0 = env.sigma0(). Accepts any B-carrier state rho0.
std::vector<DensityOperator> iterate_environment(const EnvironmentModel& env,
                                                 const DensityOperator& rho0, int n, double tau);

/// The trajectory for the qubit model; starts from |0><0|.
EnvTrajectory iterate_environment(const AttenuationProtocol& proto);

/// Nbar(rho) = Tr_LE{U (rho (x) sigma_n) U^dag}.
QuantumChannel modified_map(const AttenuationProtocol& proto);

/// gbar read off the iterated Nbar (the matrix route).
double iterated_gbar(const AttenuationProtocol& proto);
/// Same with eta supplied directly instead of eta_profile(tau, tauE).
double iterated_gbar(double p, double lambda, double eta, int n);

/// Linear recursion v_{j+1} = A v_j + w for v_j = (eta^(-1/4) z_j, x_j).
struct AttenuationRecursion {
  Eigen::Matrix2d a;
  Eigen::Vector2d w;
};
AttenuationRecursion attenuation_recursion(double p, double lambda, double eta);

/// Eigen-solution of the recursion: eigenvalues lambda_pm, normalized
/// eigenvectors and the (x_n, z_n) it yields.
struct ClosedFormSolution {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  Eigen::Vector2d vec_plus = Eigen::Vector2d::Zero();
  Eigen::Vector2d vec_minus = Eigen::Vector2d::Zero();
  double x_n = 0.0;
  double z_n = 0.0;
  double gbar = 0.0;
};

/// nullopt when an eigenvalue has |lambda_pm| >= 1 - 1e-9; the caller should
/// fall back to iteration.
std::optional<ClosedFormSolution> closed_form_solution(double p, double lambda, double eta, int n);
std::optional<double> closed_form_gbar(const AttenuationProtocol& proto);

/// Closed form when available, iteration otherwise.
double attenuated_gbar(const AttenuationProtocol& proto);

struct GbarOptimum {
  double p = 1.0;
  double gbar = 0.0;
};

/// Maximizes gbar over p in [0, 1]: 101-point grid, then golden-section
/// refinement to |dp| < 1e-6 around the best grid point.
GbarOptimum optimize_gbar(double lambda, int n, double tau, double tau_e = 1.0);

}  // namespace memchan
