#include "gaussdaemon/ergotropy.hpp"

#include "gaussdaemon/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gaussdaemon {

ErgotropyReport ergotropy(const GaussianState& state) {
  ErgotropyReport report;
  report.energy = energy(state);
  report.passive_energy = 0.5 * symplectic_eigenvalues(state.cm()).sum();
  const double w = report.energy - report.passive_energy;
  // Rounding near passivity.
  report.ergotropy = (w < 0.0 && w >= -kPsdTol) ? 0.0 : w;
  return report;
}

SingleModeNormalForm single_mode_normal_form(const CovarianceMatrix& cm) {
  if (cm.modes() != 1) {
    throw Error(ErrorKind::UnsupportedDimension, "single-mode normal form needs a 2x2 covariance matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix2> es(Matrix2(cm.matrix()));
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(1);
  SingleModeNormalForm nf;
  nf.nu = std::max(std::sqrt(lo * hi), 1.0);
  nf.z = std::sqrt(std::sqrt(hi / lo));
  if (hi - lo <= 1e-14 * hi) {
    nf.z = 1.0;
    nf.phi = 0.0;
    return nf;
  }
  // The first column of R_phi, (cos phi, -sin phi), spans the large-variance axis.
  const Vector2 v = es.eigenvectors().col(1);
  nf.phi = std::atan2(-v(1), v(0));
  return nf;
}

ExtractionUnitary extraction_unitary(const GaussianState& state) {
  if (state.modes() != 1) {
    throw Error(ErrorKind::UnsupportedDimension, "extraction_unitary: only single-mode states are supported");
  }
  const SingleModeNormalForm nf = single_mode_normal_form(state.cm());
  const Matrix2 r = rotation(nf.phi);
  ExtractionUnitary u;
  u.symplectic = r * squeezer(1.0 / nf.z) * r.transpose();
  u.displacement = -(u.symplectic * Vector2(state.mean()));
  return u;
}

}  // namespace gaussdaemon
