#pragma once

#include "gaussdaemon/rng.hpp"
#include "gaussdaemon/symplectic.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gaussdaemon {

/// Single-mode general-dyne measurement,
///   sigma_m = nu_m R_theta diag(z_m, 1/z_m) R_theta^T,
/// or, with `homodyne` set, the z_m -> 0 limit along u = R_theta (1, 0)^T.
/// nu_m = 1 is an efficient (rank-one) measurement; z_m = 1 is heterodyne.
/// sigma_m is pi-periodic in theta, so any finite angle is accepted.
struct GeneralDyneSetting {
  double nu_m = 1.0;
  double theta_m = 0.0;
  double z_m = 1.0;
  bool homodyne = false;

  static GeneralDyneSetting heterodyne(double nu_m = 1.0);
  static GeneralDyneSetting homodyne_at(double theta_m);
  static GeneralDyneSetting general(double z_m, double theta_m, double nu_m = 1.0);

  /// Throws InvalidArgument unless nu_m >= 1, z_m in (0, 1] and theta finite.
  void validate() const;

  /// Measured direction R_theta (1, 0)^T.
  Vector2 direction() const;
};

Matrix2 measurement_cm(const GeneralDyneSetting& setting);

/// Inverse of measurement_cm: recovers (nu_m, theta_m in [0, pi), z_m <= 1).
GeneralDyneSetting setting_from_cm(const Matrix2& sigma_m);

/// Setting seen after the measured mode is mapped by the symplectic s:
/// sigma_m -> s sigma_m s^T, and a homodyne direction u -> s^{-T} u.
GeneralDyneSetting transform_setting(const GeneralDyneSetting& setting, const Matrix2& s);

/// (sigma_B + sigma_m)^{-1}; for homodyne the exact limit u u^T / (u^T sigma_B u).
Matrix2 inverse_sum(const Matrix2& sigma_b, const GeneralDyneSetting& setting);

/// Multimode version: sigma_b is 2k x 2k and one setting per mode. With
/// homodyne modes present the limit W (W^T (sigma_b + F) W)^{-1} W^T is used,
/// W spanning the finite-variance directions and F the finite part of sigma_m.
Matrix measurement_inverse(const Matrix& sigma_b, std::span<const GeneralDyneSetting> settings);

/// Split of the modes into the kept subsystem A and the measured subsystem B.
struct Partition {
  std::vector<std::size_t> a_modes;
  std::vector<std::size_t> b_modes;

  /// A = mode 0, B = mode 1.
  static Partition two_mode();

  /// Disjoint, covering, in range, and B single-mode.
  void validate(std::size_t modes) const;
};

struct PartitionBlocks {
  Matrix sigma_a;
  Matrix sigma_b;
  Matrix sigma_ab;
  Vector mean_a;
  Vector mean_b;
};

PartitionBlocks split(const GaussianState& state, const Partition& partition);

/// sigma_A - sigma_AB (sigma_B + sigma_m)^{-1} sigma_AB^T; outcome independent.
CovarianceMatrix conditional_cm(const GaussianState& state, const Partition& partition,
                                const GeneralDyneSetting& setting);

/// Conditional state of A after outcome r_m on B.
GaussianState condition(const GaussianState& state, const Partition& partition,
                        const GeneralDyneSetting& setting, const Vector2& outcome);

/// Draws r_m ~ N(mean_B, (sigma_B + sigma_m) / 2). The 1/2 converts the
/// anticommutator covariance convention to an ordinary covariance. Homodyne
/// draws the measured quadrature only; the orthogonal component is returned at
/// its mean (it does not enter the conditional state).
Vector2 sample_outcome(const GaussianState& state, const Partition& partition,
                       const GeneralDyneSetting& setting, RngStream& rng);

}  // namespace gaussdaemon
