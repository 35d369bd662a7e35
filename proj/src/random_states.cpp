#include "gaussdaemon/random_states.hpp"

#include <cmath>
#include <numbers>

namespace gaussdaemon {

namespace {

double uniform(RngStream& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix embed(const Matrix2& s, std::size_t mode, std::size_t modes) {
  Matrix out = Matrix::Identity(static_cast<Eigen::Index>(2 * modes), static_cast<Eigen::Index>(2 * modes));
  const auto o = static_cast<Eigen::Index>(2 * mode);
  out.block<2, 2>(o, o) = s;
  return out;
}

Matrix beam_splitter(double angle, std::size_t i, std::size_t j, std::size_t modes) {
  Matrix out = Matrix::Identity(static_cast<Eigen::Index>(2 * modes), static_cast<Eigen::Index>(2 * modes));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const auto oi = static_cast<Eigen::Index>(2 * i);
  const auto oj = static_cast<Eigen::Index>(2 * j);
  out.block<2, 2>(oi, oi) = c * Matrix2::Identity();
  out.block<2, 2>(oj, oj) = c * Matrix2::Identity();
  out.block<2, 2>(oi, oj) = s * Matrix2::Identity();
  out.block<2, 2>(oj, oi) = -s * Matrix2::Identity();
  return out;
}

}  // namespace

Matrix random_symplectic(std::size_t modes, RngStream& rng, double max_log_squeeze) {
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  Matrix s = Matrix::Identity(dim, dim);
  auto local_layer = [&] {
    for (std::size_t j = 0; j < modes; ++j) {
      const Matrix2 r1 = rotation(uniform(rng, 0.0, 2.0 * std::numbers::pi));
      const Matrix2 z = squeezer(std::exp(uniform(rng, -max_log_squeeze, max_log_squeeze)));
      const Matrix2 r2 = rotation(uniform(rng, 0.0, 2.0 * std::numbers::pi));
      s = embed(r2 * z * r1, j, modes) * s;
    }
  };
  local_layer();
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = i + 1; j < modes; ++j) {
      s = beam_splitter(uniform(rng, 0.0, std::numbers::pi), i, j, modes) * s;
    }
  }
  local_layer();
  return s;
}

GaussianState random_state(std::size_t modes, RngStream& rng, double max_excess, double max_log_squeeze,
                           double max_mean) {
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  Vector nu(dim);
  for (std::size_t j = 0; j < modes; ++j) {
    const double v = 1.0 + uniform(rng, 0.0, max_excess);
    nu(static_cast<Eigen::Index>(2 * j)) = v;
    nu(static_cast<Eigen::Index>(2 * j + 1)) = v;
  }
  const Matrix s = random_symplectic(modes, rng, max_log_squeeze);
  Vector mean(dim);
  for (Eigen::Index i = 0; i < dim; ++i) mean(i) = uniform(rng, -max_mean, max_mean);
  return GaussianState(std::move(mean), CovarianceMatrix::from_computed(s * nu.asDiagonal() * s.transpose()));
}

TwoModeStandardForm random_standard_form(RngStream& rng) {
  return standard_form(random_state(2, rng)).form;
}

GeneralDyneSetting random_efficient_setting(RngStream& rng) {
  const double theta = uniform(rng, 0.0, std::numbers::pi);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      return GeneralDyneSetting::heterodyne();
    case 1:
      return GeneralDyneSetting::homodyne_at(theta);
    default:
      return GeneralDyneSetting::general(std::exp(uniform(rng, std::log(1e-4), 0.0)), theta);
  }
}

GeneralDyneSetting random_setting(RngStream& rng) {
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    const double theta = uniform(rng, 0.0, std::numbers::pi);
    return GeneralDyneSetting::general(std::exp(uniform(rng, std::log(1e-3), 0.0)), theta,
                                       1.0 + uniform(rng, 0.0, 2.0));
  }
  return random_efficient_setting(rng);
}

}  // namespace gaussdaemon
