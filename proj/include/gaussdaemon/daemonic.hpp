#pragma once

// Daemonic ergotropy of Gaussian states: work extractable from subsystem A,
// averaged over the outcomes of a general-dyne measurement on B,
//   E_daemonic = tr(sigma_A)/4 + |mean_A|^2/2 - sum_j nu_j(sigma_A^(c)) / 2.
// Because sigma_A^(c) does not depend on the outcome, for one-mode A this is
// E(rho_A) - 1 / (2 * conditional purity): maximising work is maximising
// conditional purity.

#include "gaussdaemon/general_dyne.hpp"
#include "gaussdaemon/symplectic.hpp"

namespace gaussdaemon {

/// Local-symplectic canonical form of a 1-vs-1 mode state:
///   sigma_A = a diag(z_A, 1/z_A), sigma_B = b I, sigma_AB = R_eta diag(c+, c-),
/// with c+ >= |c-| and sign(c-) = sign(det sigma_AB).
struct TwoModeStandardForm {
  double a = 1.0;
  double z_a = 1.0;
  double b = 1.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double eta = 0.0;

  Matrix covariance() const;
  GaussianState to_state(const Vector2& mean_a = Vector2::Zero(),
                         const Vector2& mean_b = Vector2::Zero()) const;

  /// Energy of subsystem A, tr(sigma_A)/4 + |mean_A|^2/2.
  double energy_a(const Vector2& mean_a = Vector2::Zero()) const;

  /// (ab - c+^2)(ab - c-^2) - a^2 - b^2 - 2 c+ c- + 1. This is the two-mode
  /// Heisenberg margin only when z_A = 1 and eta = 0.
  double heisenberg_margin_phase_invariant() const;

  /// Parameter ranges plus physicality of the reconstructed covariance matrix.
  void validate() const;
};

struct StandardFormReduction {
  TwoModeStandardForm form;
  /// Rotation on A (ergotropy of A is unchanged).
  Matrix2 s_a = Matrix2::Identity();
  /// Symplectic on B.
  Matrix2 s_b = Matrix2::Identity();
  /// s_a applied to the mean of A.
  Vector2 mean_a = Vector2::Zero();
};

StandardFormReduction standard_form(const GaussianState& state);

struct DaemonicResult {
  double value = 0.0;
  GeneralDyneSetting setting;
  /// Purity of the conditional state of A.
  double conditional_purity = 1.0;
};

/// Generic route: conditions the state and evaluates the ergotropy formula.
DaemonicResult daemonic_ergotropy(const GaussianState& state, const GeneralDyneSetting& setting,
                                  const Partition& partition = Partition::two_mode());

struct OptimalPhase {
  double theta = 0.0;
  /// True when the conditional purity does not depend on the phase.
  bool degenerate = false;
};

/// Measurement phase in [0, pi) minimising det sigma_A^(c) for an efficient
/// general-dyne with parameter z_m in (0, 1]; z_m = 0 selects the homodyne limit.
OptimalPhase optimal_phase(const TwoModeStandardForm& sf, double z_m);

/// Closed-form det sigma_A^(c) for efficient general-dyne (z_m in (0, 1]) at
/// phase theta; z_m = 0 selects homodyne.
double conditional_det(const TwoModeStandardForm& sf, double z_m, double theta);
double conditional_det_heterodyne(const TwoModeStandardForm& sf);

/// Closed-form evaluation for a given efficient setting.
DaemonicResult daemonic_closed_form(const TwoModeStandardForm& sf, const Vector2& mean_a,
                                    const GeneralDyneSetting& setting);

/// Maximum over efficient general-dyne measurements: optimal phase in closed
/// form, z_m by golden-section on log z_m in [1e-6, 1] (ties go to z_m = 1), then
/// the homodyne limit z_m -> 0 is compared as well.
/// The optimum is re-evaluated through the conditioning pipeline and a
/// Numeric error is raised if the two routes disagree by more than 1e-9.
DaemonicResult max_daemonic(const TwoModeStandardForm& sf, const Vector2& mean_a = Vector2::Zero());
DaemonicResult max_daemonic_homodyne(const TwoModeStandardForm& sf,
                                     const Vector2& mean_a = Vector2::Zero());
DaemonicResult daemonic_heterodyne(const TwoModeStandardForm& sf,
                                   const Vector2& mean_a = Vector2::Zero());

/// det sigma_A^(c) for phase-invariant forms (z_A = 1, eta = 0, c+ = -c- = c).
double phase_invariant_conditional_det(double a, double b, double c, double z_m);

/// Two-mode squeezed thermal state: thermal seed with N mean excitations,
/// squeezing r. a = b = (2N+1) cosh 2r, c+ = -c- = (2N+1) sinh 2r.
GaussianState tmsts(double n_thermal, double r);
TwoModeStandardForm tmsts_standard_form(double n_thermal, double r);
double tmsts_daemonic_heterodyne(double n_thermal, double r);
double tmsts_daemonic_homodyne(double n_thermal, double r);

}  // namespace gaussdaemon
