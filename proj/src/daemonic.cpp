#include "gaussdaemon/daemonic.hpp"

#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/error.hpp"
#include "gaussdaemon/optimize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace gaussdaemon {

namespace {

constexpr double kLogZMin = -13.815510557964274;  // log(1e-6)
constexpr double kLogTol = 1e-10;
constexpr std::size_t kScanPoints = 61;
constexpr double kRouteTol = 1e-9;

double wrap_phase(double theta) {
  theta = std::fmod(theta, std::numbers::pi);
  return theta < 0.0 ? theta + std::numbers::pi : theta;
}

DaemonicResult make_result(const TwoModeStandardForm& sf, const Vector2& mean_a,
                           const GeneralDyneSetting& setting, double det) {
  if (!(det > 0.0)) throw Error(ErrorKind::Numeric, "conditional determinant is not positive");
  const double nu = std::max(std::sqrt(det), 1.0);
  return DaemonicResult{sf.energy_a(mean_a) - 0.5 * nu, setting, 1.0 / nu};
}

void cross_check(const TwoModeStandardForm& sf, const Vector2& mean_a, const DaemonicResult& closed) {
  const DaemonicResult pipeline = daemonic_ergotropy(sf.to_state(mean_a), closed.setting);
  const double gap = std::abs(pipeline.value - closed.value);
  if (gap > kRouteTol * std::max(1.0, std::abs(closed.value))) {
    std::ostringstream os;
    os << "closed-form daemonic ergotropy " << closed.value << " disagrees with the conditioning pipeline "
       << pipeline.value << " (gap " << gap << ")";
    throw Error(ErrorKind::Numeric, os.str());
  }
}

}  // namespace

Matrix TwoModeStandardForm::covariance() const {
  Matrix s = Matrix::Zero(4, 4);
  s.block<2, 2>(0, 0) = a * squeezer(z_a);
  s.block<2, 2>(2, 2) = b * Matrix2::Identity();
  Matrix2 c = Matrix2::Zero();
  c(0, 0) = c_plus;
  c(1, 1) = c_minus;
  const Matrix2 ab = rotation(eta) * c;
  s.block<2, 2>(0, 2) = ab;
  s.block<2, 2>(2, 0) = ab.transpose();
  return s;
}

GaussianState TwoModeStandardForm::to_state(const Vector2& mean_a, const Vector2& mean_b) const {
  validate();
  Vector mean(4);
  mean << mean_a, mean_b;
  return GaussianState(std::move(mean), CovarianceMatrix::from_computed(covariance()));
}

double TwoModeStandardForm::energy_a(const Vector2& mean_a) const {
  return 0.25 * (z_a + 1.0 / z_a) * a + 0.5 * mean_a.squaredNorm();
}

double TwoModeStandardForm::heisenberg_margin_phase_invariant() const {
  return (a * b - c_plus * c_plus) * (a * b - c_minus * c_minus) - a * a - b * b -
         2.0 * c_plus * c_minus + 1.0;
}

void TwoModeStandardForm::validate() const {
  if (!(a >= 1.0 - kPsdTol) || !(b >= 1.0 - kPsdTol) || !(z_a > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "standard form: need a >= 1, b >= 1, z_A > 0");
  }
  if (!(c_plus >= 0.0) || std::abs(c_minus) > c_plus * (1.0 + 1e-12) + 1e-15 || !std::isfinite(eta)) {
    throw Error(ErrorKind::InvalidArgument, "standard form: need c+ >= |c-| and c+ >= 0");
  }
  const double lowest = heisenberg_min_eigenvalue(covariance());
  if (lowest < -kPsdTol) {
    std::ostringstream os;
    os << "standard form violates the Heisenberg relation (most negative eigenvalue " << lowest << ")";
    throw Error(ErrorKind::Unphysical, os.str());
  }
}

StandardFormReduction standard_form(const GaussianState& state) {
  if (state.modes() != 2) {
    throw Error(ErrorKind::UnsupportedDimension, "standard_form: a two-mode state is required");
  }
  const Matrix& s = state.covariance();
  const Matrix2 sigma_a = s.block<2, 2>(0, 0);
  const Matrix2 sigma_b = s.block<2, 2>(2, 2);
  const Matrix2 sigma_ab = s.block<2, 2>(0, 2);

  // B to Williamson form.
  const SingleModeNormalForm nf_b = single_mode_normal_form(CovarianceMatrix::from_computed(sigma_b));
  const Matrix2 rb = rotation(nf_b.phi);
  const Matrix2 s_b0 = rb * squeezer(1.0 / nf_b.z) * rb.transpose();

  // A diagonal with the larger variance on x.
  Eigen::SelfAdjointEigenSolver<Matrix2> es(sigma_a);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(1);
  const bool isotropic_a = (hi - lo) <= 1e-12 * hi;
  Matrix2 r_a = Matrix2::Identity();
  if (!isotropic_a) {
    const Vector2 v = es.eigenvectors().col(1);
    r_a << v(0), v(1), -v(1), v(0);
  }

  // sigma_AB -> U d V^T with U, V proper rotations.
  const Matrix2 x = r_a * sigma_ab * s_b0.transpose();
  Eigen::JacobiSVD<Matrix2> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix2 u = svd.matrixU();
  Matrix2 v = svd.matrixV();
  Vector2 d = svd.singularValues();
  if (v.determinant() < 0.0) {
    v.col(1) *= -1.0;
    d(1) = -d(1);
  }
  if (u.determinant() < 0.0) {
    u.col(1) *= -1.0;
    d(1) = -d(1);
  }

  StandardFormReduction out;
  out.form.a = std::max(std::sqrt(lo * hi), 1.0);
  out.form.z_a = isotropic_a ? 1.0 : std::sqrt(hi / lo);
  out.form.b = nf_b.nu;
  out.form.c_plus = d(0);
  out.form.c_minus = d(1);
  out.form.eta = std::atan2(u(0, 1), u(0, 0));
  out.s_a = r_a;
  out.s_b = v.transpose() * s_b0;
  if (isotropic_a) {
    // Rotating an isotropic A absorbs eta.
    out.s_a = u.transpose() * r_a;
    out.form.eta = 0.0;
  }
  out.mean_a = out.s_a * Vector2(state.mean().head<2>());
  return out;
}

DaemonicResult daemonic_ergotropy(const GaussianState& state, const GeneralDyneSetting& setting,
                                  const Partition& partition) {
  const PartitionBlocks blk = split(state, partition);
  const CovarianceMatrix cond = conditional_cm(state, partition, setting);
  const double e_a = 0.25 * blk.sigma_a.trace() + 0.5 * blk.mean_a.squaredNorm();
  const SymplecticSpectrum spec = symplectic_eigenvalues(cond);
  return DaemonicResult{e_a - 0.5 * spec.sum(), setting, 1.0 / spec.product()};
}

OptimalPhase optimal_phase(const TwoModeStandardForm& sf, double z_m) {
  if (!(z_m >= 0.0 && z_m <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "optimal_phase: z_m must lie in [0, 1] (0 = homodyne)");
  }
  const double za2 = sf.z_a * sf.z_a;
  const double cp2 = sf.c_plus * sf.c_plus;
  const double cm2 = sf.c_minus * sf.c_minus;
  // det sigma_A^(c) = K + (z_m^2 - 1) a (alpha cos 2theta + beta sin 2theta) / positive.
  const double alpha = (za2 + 1.0) * (cp2 - cm2) - std::cos(2.0 * sf.eta) * (za2 - 1.0) * (cp2 + cm2);
  const double beta = 2.0 * std::sin(2.0 * sf.eta) * (za2 - 1.0) * sf.c_plus * sf.c_minus;
  const double scale = (za2 + 1.0) * (cp2 + cm2);
  if (z_m == 1.0 || std::hypot(alpha, beta) <= 1e-12 * std::max(scale, 1e-300)) {
    return OptimalPhase{0.0, true};
  }
  return OptimalPhase{wrap_phase(0.5 * std::atan2(beta, alpha)), false};
}

double conditional_det(const TwoModeStandardForm& sf, double z_m, double theta) {
  const double a = sf.a;
  const double b = sf.b;
  const double za = sf.z_a;
  const double cp = sf.c_plus;
  const double cm = sf.c_minus;
  const double eta = sf.eta;
  if (z_m == 0.0) {
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    return a * a -
           a * std::sin(eta) * std::sin(eta) / (b * za) * (za * za * cp * cp * c2 + cm * cm * s2) -
           a * std::cos(eta) * std::cos(eta) / (b * za) * (cp * cp * c2 + za * za * cm * cm * s2) -
           a * std::sin(2.0 * eta) / (2.0 * b * za) * (za * za - 1.0) * cp * cm * std::sin(2.0 * theta);
  }
  if (!(z_m > 0.0 && z_m <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "conditional_det: z_m must lie in [0, 1]");
  }
  const double z = z_m;
  const double cp2 = cp * cp;
  const double cm2 = cm * cm;
  const double poly = 1.0 + 2.0 * b * z + z * z;
  const double c2t = std::cos(2.0 * theta);
  const double numer =
      4.0 * cp2 * cm2 * za * z - (cp2 + cm2) * (1.0 + za * za) * poly * a +
      4.0 * za * (b + z) * (1.0 + b * z) * a * a +
      (za * za - 1.0) * a * std::cos(2.0 * eta) * ((cp2 - cm2) * poly - (cp2 + cm2) * (z * z - 1.0) * c2t) +
      (z * z - 1.0) * a *
          ((cp2 - cm2) * (za * za + 1.0) * c2t +
           2.0 * cp * cm * (za * za - 1.0) * std::sin(2.0 * eta) * std::sin(2.0 * theta));
  return numer / (4.0 * za * (b + z) * (b * z + 1.0));
}

double conditional_det_heterodyne(const TwoModeStandardForm& sf) {
  const double a = sf.a;
  const double b = sf.b;
  const double za = sf.z_a;
  const double cp2 = sf.c_plus * sf.c_plus;
  const double cm2 = sf.c_minus * sf.c_minus;
  const double s2 = std::sin(sf.eta) * std::sin(sf.eta);
  const double c2 = std::cos(sf.eta) * std::cos(sf.eta);
  const double bracket = cm2 * cp2 * za * c2 * c2 +
                         (a * (1.0 + b) * za - cm2 * s2) * (a + a * b - cp2 * za * s2) +
                         c2 * (-a * (1.0 + b) * (cp2 + cm2 * za * za) + 2.0 * cm2 * cp2 * za * s2);
  return bracket / (za * (1.0 + b) * (1.0 + b));
}

DaemonicResult daemonic_closed_form(const TwoModeStandardForm& sf, const Vector2& mean_a,
                                    const GeneralDyneSetting& setting) {
  setting.validate();
  if (!setting.homodyne && std::abs(setting.nu_m - 1.0) > kPsdTol) {
    throw Error(ErrorKind::InvalidArgument, "closed forms cover efficient (nu_m = 1) measurements only");
  }
  double det = 0.0;
  if (setting.homodyne) {
    det = conditional_det(sf, 0.0, setting.theta_m);
  } else if (setting.z_m == 1.0) {
    det = conditional_det_heterodyne(sf);
  } else {
    det = conditional_det(sf, setting.z_m, setting.theta_m);
  }
  return make_result(sf, mean_a, setting, det);
}

DaemonicResult max_daemonic(const TwoModeStandardForm& sf, const Vector2& mean_a) {
  sf.validate();
  auto det_at = [&](double log_z) {
    const double z = std::exp(log_z);
    return conditional_det(sf, z, optimal_phase(sf, z).theta);
  };
  ScalarMinimum best = bracketed_minimize(det_at, kLogZMin, 0.0, kScanPoints, kLogTol);
  const double det_het = conditional_det_heterodyne(sf);
  GeneralDyneSetting setting = GeneralDyneSetting::heterodyne();
  double det = det_het;
  if (best.value < det_het - 1e-13 * std::max(1.0, det_het)) {
    const double z = std::exp(best.x);
    setting = GeneralDyneSetting::general(std::min(z, 1.0), optimal_phase(sf, z).theta);
    det = best.value;
  }
  // The homodyne limit closes the z_m range at 0.
  const double hom_theta = optimal_phase(sf, 0.0).theta;
  const double det_hom = conditional_det(sf, 0.0, hom_theta);
  if (det_hom < det - 1e-13 * std::max(1.0, det)) {
    setting = GeneralDyneSetting::homodyne_at(hom_theta);
    det = det_hom;
  }
  DaemonicResult result = make_result(sf, mean_a, setting, det);
  cross_check(sf, mean_a, result);
  return result;
}

DaemonicResult max_daemonic_homodyne(const TwoModeStandardForm& sf, const Vector2& mean_a) {
  sf.validate();
  const OptimalPhase phase = optimal_phase(sf, 0.0);
  const GeneralDyneSetting setting = GeneralDyneSetting::homodyne_at(phase.theta);
  DaemonicResult result = make_result(sf, mean_a, setting, conditional_det(sf, 0.0, phase.theta));
  cross_check(sf, mean_a, result);
  return result;
}

DaemonicResult daemonic_heterodyne(const TwoModeStandardForm& sf, const Vector2& mean_a) {
  sf.validate();
  DaemonicResult result =
      make_result(sf, mean_a, GeneralDyneSetting::heterodyne(), conditional_det_heterodyne(sf));
  cross_check(sf, mean_a, result);
  return result;
}

double phase_invariant_conditional_det(double a, double b, double c, double z_m) {
  return (a + a * b * z_m - c * c * z_m) * (-c * c + a * (b + z_m)) / ((b + z_m) * (1.0 + b * z_m));
}

TwoModeStandardForm tmsts_standard_form(double n_thermal, double r) {
  if (!(n_thermal >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidArgument, "tmsts: need N >= 0 and finite r");
  }
  const double nu = 2.0 * n_thermal + 1.0;
  TwoModeStandardForm sf;
  sf.a = sf.b = nu * std::cosh(2.0 * r);
  sf.c_plus = nu * std::abs(std::sinh(2.0 * r));
  sf.c_minus = -sf.c_plus;
  return sf;
}

GaussianState tmsts(double n_thermal, double r) {
  return tmsts_standard_form(n_thermal, r).to_state();
}

double tmsts_daemonic_heterodyne(double n_thermal, double r) {
  const double nu = 2.0 * n_thermal + 1.0;
  const double s = std::sinh(2.0 * r);
  return nu * nu * s * s / (2.0 + 2.0 * nu * std::cosh(2.0 * r));
}

double tmsts_daemonic_homodyne(double n_thermal, double r) {
  const double s = std::sinh(r);
  return (2.0 * n_thermal + 1.0) * s * s;
}

}  // namespace gaussdaemon
