#include "gaussdaemon/general_dyne.hpp"

#include "gaussdaemon/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace gaussdaemon {

GeneralDyneSetting GeneralDyneSetting::heterodyne(double nu_m) {
  return general(1.0, 0.0, nu_m);
}

GeneralDyneSetting GeneralDyneSetting::homodyne_at(double theta_m) {
  GeneralDyneSetting s;
  s.theta_m = theta_m;
  s.homodyne = true;
  s.validate();
  return s;
}

GeneralDyneSetting GeneralDyneSetting::general(double z_m, double theta_m, double nu_m) {
  GeneralDyneSetting s;
  s.nu_m = nu_m;
  s.theta_m = theta_m;
  s.z_m = z_m;
  s.validate();
  return s;
}

void GeneralDyneSetting::validate() const {
  if (!std::isfinite(theta_m)) {
    throw Error(ErrorKind::InvalidArgument, "general-dyne: theta_m must be finite");
  }
  if (homodyne) return;
  if (!(nu_m >= 1.0 - kPsdTol) || !std::isfinite(nu_m)) {
    throw Error(ErrorKind::InvalidArgument, "general-dyne: nu_m must be >= 1");
  }
  if (!(z_m > 0.0 && z_m <= 1.0)) {
    std::ostringstream os;
    os << "general-dyne: z_m must lie in (0, 1], got " << z_m;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

Vector2 GeneralDyneSetting::direction() const { return rotation(theta_m).col(0); }

Matrix2 measurement_cm(const GeneralDyneSetting& setting) {
  if (setting.homodyne) {
    throw Error(ErrorKind::InvalidArgument,
                "measurement_cm: homodyne has no finite measurement CM; use inverse_sum");
  }
  setting.validate();
  const Matrix2 r = rotation(setting.theta_m);
  return setting.nu_m * r * squeezer(setting.z_m) * r.transpose();
}

namespace {

// z_m from the trace and theta_m from the large-variance axis R_theta (0, 1)^T
// = (sin, cos); both stay accurate when z_m is small.
GeneralDyneSetting from_cm(const Matrix2& sigma_m, double nu) {
  Eigen::SelfAdjointEigenSolver<Matrix2> es(symmetrized(sigma_m));
  GeneralDyneSetting s;
  s.nu_m = nu;
  const double t = sigma_m.trace() / nu;
  s.z_m = std::min(1.0, 2.0 / (t + std::sqrt(std::max(t * t - 4.0, 0.0))));
  const Vector2 v = es.eigenvectors().col(1);
  double theta = std::fmod(std::atan2(v(0), v(1)), std::numbers::pi);
  if (theta < 0.0) theta += std::numbers::pi;
  s.theta_m = (s.z_m == 1.0) ? 0.0 : theta;
  s.validate();
  return s;
}

}  // namespace

GeneralDyneSetting setting_from_cm(const Matrix2& sigma_m) {
  const Matrix2 sym = symmetrized(sigma_m);
  const double det = sym.determinant();
  if (!(det > 0.0) || !(sym.trace() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "setting_from_cm: matrix not positive");
  }
  double nu = std::sqrt(det);
  if (nu < 1.0 && nu >= 1.0 - kPsdTol) nu = 1.0;
  return from_cm(sym, nu);
}

GeneralDyneSetting transform_setting(const GeneralDyneSetting& setting, const Matrix2& s) {
  setting.validate();
  if (setting.homodyne) {
    const Vector2 u = (s.inverse().transpose() * setting.direction()).normalized();
    double theta = std::fmod(std::atan2(-u(1), u(0)), std::numbers::pi);
    if (theta < 0.0) theta += std::numbers::pi;
    return GeneralDyneSetting::homodyne_at(theta);
  }
  // det s = 1, so nu_m is unchanged.
  return from_cm(symmetrized(s * measurement_cm(setting) * s.transpose()), setting.nu_m);
}

Matrix2 inverse_sum(const Matrix2& sigma_b, const GeneralDyneSetting& setting) {
  const GeneralDyneSetting one[] = {setting};
  return measurement_inverse(sigma_b, one);
}

Matrix measurement_inverse(const Matrix& sigma_b, std::span<const GeneralDyneSetting> settings) {
  const auto dim = sigma_b.rows();
  if (sigma_b.cols() != dim || dim != static_cast<Eigen::Index>(2 * settings.size())) {
    throw Error(ErrorKind::InvalidDimension, "measurement_inverse: one setting per measured mode required");
  }
  // Basis of the directions with finite measurement noise, and that noise.
  std::vector<Vector> basis;
  Matrix finite = Matrix::Zero(dim, dim);
  bool any_homodyne = false;
  for (std::size_t j = 0; j < settings.size(); ++j) {
    const auto& s = settings[j];
    s.validate();
    const auto o = static_cast<Eigen::Index>(2 * j);
    if (s.homodyne) {
      any_homodyne = true;
      Vector u = Vector::Zero(dim);
      u.segment<2>(o) = s.direction();
      basis.push_back(std::move(u));
    } else {
      finite.block<2, 2>(o, o) = measurement_cm(s);
      for (Eigen::Index k = 0; k < 2; ++k) basis.push_back(Vector::Unit(dim, o + k));
    }
  }

  const Matrix total = symmetrized(sigma_b + finite);
  if (!any_homodyne) {
    Eigen::LLT<Matrix> llt(total);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::Numeric, "measurement_inverse: sigma_B + sigma_m is singular");
    }
    return symmetrized(llt.solve(Matrix::Identity(dim, dim)));
  }

  Matrix w(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = basis[k];
  Eigen::LLT<Matrix> llt(symmetrized(w.transpose() * total * w));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "measurement_inverse: projected sigma_B + sigma_m is singular");
  }
  return symmetrized(w * llt.solve(w.transpose()));
}

Partition Partition::two_mode() { return Partition{{0}, {1}}; }

void Partition::validate(std::size_t modes) const {
  if (a_modes.empty()) throw Error(ErrorKind::InvalidArgument, "partition: subsystem A is empty");
  if (b_modes.size() != 1) {
    throw Error(ErrorKind::InvalidArgument, "partition: the measured subsystem B must be a single mode");
  }
  std::set<std::size_t> seen;
  for (auto m : a_modes) seen.insert(m);
  for (auto m : b_modes) seen.insert(m);
  if (seen.size() != a_modes.size() + b_modes.size()) {
    throw Error(ErrorKind::InvalidArgument, "partition: A and B overlap or repeat modes");
  }
  if (seen.size() != modes || *seen.rbegin() >= modes) {
    throw Error(ErrorKind::InvalidArgument, "partition: A and B must cover all modes of the state");
  }
}

PartitionBlocks split(const GaussianState& state, const Partition& partition) {
  partition.validate(state.modes());
  const auto ia = quadrature_indices(partition.a_modes);
  const auto ib = quadrature_indices(partition.b_modes);
  const Matrix& s = state.covariance();
  return PartitionBlocks{sub_block(s, ia, ia), sub_block(s, ib, ib), sub_block(s, ia, ib),
                         sub_vector(state.mean(), ia), sub_vector(state.mean(), ib)};
}

CovarianceMatrix conditional_cm(const GaussianState& state, const Partition& partition,
                                const GeneralDyneSetting& setting) {
  const PartitionBlocks blk = split(state, partition);
  const Matrix2 inv = inverse_sum(blk.sigma_b, setting);
  return CovarianceMatrix::from_computed(blk.sigma_a - blk.sigma_ab * inv * blk.sigma_ab.transpose());
}

GaussianState condition(const GaussianState& state, const Partition& partition,
                        const GeneralDyneSetting& setting, const Vector2& outcome) {
  const PartitionBlocks blk = split(state, partition);
  const Matrix2 inv = inverse_sum(blk.sigma_b, setting);
  Vector mean = blk.mean_a + blk.sigma_ab * inv * (outcome - blk.mean_b);
  return GaussianState(std::move(mean), CovarianceMatrix::from_computed(
                                            blk.sigma_a - blk.sigma_ab * inv * blk.sigma_ab.transpose()));
}

Vector2 sample_outcome(const GaussianState& state, const Partition& partition,
                       const GeneralDyneSetting& setting, RngStream& rng) {
  const PartitionBlocks blk = split(state, partition);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector2 mean_b = blk.mean_b;
  if (setting.homodyne) {
    setting.validate();
    const Vector2 u = setting.direction();
    const double var = 0.5 * u.dot(blk.sigma_b * u);
    return mean_b + std::sqrt(var) * normal(rng) * u;
  }
  const Matrix2 cov = 0.5 * (Matrix2(blk.sigma_b) + measurement_cm(setting));
  Eigen::LLT<Matrix2> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "sample_outcome: outcome covariance is not positive definite");
  }
  const double x0 = normal(rng);
  const double x1 = normal(rng);
  return mean_b + llt.matrixL() * Vector2(x0, x1);
}

}  // namespace gaussdaemon
