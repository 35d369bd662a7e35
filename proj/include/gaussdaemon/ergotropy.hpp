#pragma once

#include "gaussdaemon/symplectic.hpp"

namespace gaussdaemon {

struct ErgotropyReport {
  double ergotropy = 0.0;
  double energy = 0.0;
  /// Energy of the passive (Williamson thermal, zero-mean) state: sum(nu_j) / 2.
  double passive_energy = 0.0;
};

/// Work unitarily extractable with respect to the free Hamiltonian:
/// tr(sigma)/4 + |mean|^2/2 - sum(nu_j)/2.
ErgotropyReport ergotropy(const GaussianState& state);

/// Phase-space form of the optimal extraction unitary for one mode: apply
/// `symplectic`, then shift by `displacement`, and the state becomes nu * I
/// with zero mean.
struct ExtractionUnitary {
  Matrix2 symplectic = Matrix2::Identity();
  Vector2 displacement = Vector2::Zero();
};

/// sigma = nu * R_phi diag(z^2, 1/z^2) R_phi^T with z >= 1.
struct SingleModeNormalForm {
  double nu = 1.0;
  double z = 1.0;
  double phi = 0.0;
};

SingleModeNormalForm single_mode_normal_form(const CovarianceMatrix& cm);

ExtractionUnitary extraction_unitary(const GaussianState& state);

}  // namespace gaussdaemon
