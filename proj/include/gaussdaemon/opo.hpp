#pragma once

// Degenerate optical parametric oscillator below threshold: squeezing
// Hamiltonian of strength chi, loss at rate kappa into a thermal bath with
// occupation n_th.

#include "gaussdaemon/io.hpp"
#include "gaussdaemon/monitored.hpp"
#include "gaussdaemon/optimize.hpp"

#include <optional>
#include <vector>

namespace gaussdaemon {

struct OpoParams {
  double chi = 0.0;
  double kappa = 1.0;
  double n_th = 0.0;
  double nu0 = 1.0;

  double chi_tilde() const { return 2.0 * chi / kappa; }
  double nu_in() const { return 2.0 * n_th + 1.0; }

  /// 0 <= chi_tilde < 1 (Instability otherwise), kappa > 0, n_th >= 0, nu0 >= 1.
  void validate() const;

  static OpoParams from_tilde(double chi_tilde, double nu_in = 1.0, double nu0 = 1.0, double kappa = 1.0);
};

/// H_S = -chi [[0, 1], [1, 0]], C = sqrt(kappa) Omega, sigma_in = nu_in I.
DiffusiveModel opo_model(const OpoParams& p);
MonitoredModel opo_monitored(const OpoParams& p, const GeneralDyneSetting& setting);

/// Thermal nu0 I with zero mean.
GaussianState opo_initial_state(const OpoParams& p);

GaussianState opo_unconditional_ss(const OpoParams& p);
double opo_unconditional_ergotropy(const OpoParams& p);

/// Closed forms for efficient homodyne at theta = 0, pi/2 and heterodyne; the
/// Riccati solver otherwise.
CovarianceMatrix opo_conditional_ss(const OpoParams& p, const GeneralDyneSetting& setting);

/// Steady-state daemonic ergotropy under the given unravelling.
double opo_daemonic_ss(const OpoParams& p, const GeneralDyneSetting& setting);
double opo_daemonic_ss_zero_temperature(double chi_tilde);

/// (1 - chi_tilde) / (1 + chi_tilde).
double opo_zopt(const OpoParams& p);

/// Golden-section search over log z_m in [1e-6, 1] at theta = 0 using the
/// Riccati steady state; x is z_m, value the daemonic ergotropy.
ScalarMinimum opo_zopt_numeric(const OpoParams& p);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Steady-state daemonic ergotropy against z_m (theta = 0), with the z_opt
/// point inserted in order and the heterodyne reference in the comments.
Table figure1_data(const OpoParams& p, const std::vector<double>& z_grid);

struct TransientCurves {
  std::vector<double> kappa_t;
  std::vector<double> hom0;
  std::vector<double> hom90;
  std::vector<double> het;
};

/// Daemonic ergotropy from the thermal initial state, dt and t_final in units
/// of 1/kappa.
TransientCurves transient_curves(const OpoParams& p, double dt, double t_final);
Table figure23_data(const OpoParams& p, const TransientCurves& curves);

/// First time after which the better homodyne stops trailing heterodyne,
/// linearly interpolated on the grid.
std::optional<double> homodyne_overtakes_heterodyne(const TransientCurves& curves);

}  // namespace gaussdaemon
