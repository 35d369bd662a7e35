#include "helpers.hpp"

#include "gaussdaemon/daemonic.hpp"
#include "gaussdaemon/general_dyne.hpp"
#include "gaussdaemon/random_states.hpp"

#include <cmath>
#include <numbers>

using namespace gaussdaemon;

namespace {

struct Moments {
  Vector2 mean = Vector2::Zero();
  Matrix2 cov = Matrix2::Zero();
  Matrix2 se = Matrix2::Zero();  // standard error of each covariance entry
};

template <class Draw>
Moments sample_moments(Draw&& draw, int n) {
  std::vector<Vector2> xs;
  xs.reserve(static_cast<std::size_t>(n));
  Moments m;
  for (int k = 0; k < n; ++k) {
    xs.push_back(draw());
    m.mean += xs.back();
  }
  m.mean /= n;
  for (const auto& x : xs) m.cov += (x - m.mean) * (x - m.mean).transpose();
  m.cov /= (n - 1);
  Matrix2 sq = Matrix2::Zero();
  for (const auto& x : xs) {
    const Matrix2 p = (x - m.mean) * (x - m.mean).transpose() - m.cov;
    sq += p.cwiseProduct(p);
  }
  m.se = (sq / (double(n) * (n - 1))).cwiseSqrt();
  return m;
}

GaussianState product_state() {
  const GaussianState a(Vector2(0.3, -0.1), CovarianceMatrix(Matrix(Eigen::Vector2d(2.0, 0.8).asDiagonal())));
  return tensor(a, GaussianState::thermal(2.0));
}

}  // namespace

TEST_SUITE("general_dyne") {
  TEST_CASE("measurement CM") {
    CHECK(max_diff(measurement_cm(GeneralDyneSetting::heterodyne()), Matrix2::Identity()) == 0.0);
    const Matrix2 r = rotation(std::numbers::pi / 4);
    const Matrix2 expected = r * Matrix2(Eigen::Vector2d(0.5, 2.0).asDiagonal()) * r.transpose();
    CHECK(max_diff(measurement_cm(GeneralDyneSetting::general(0.5, std::numbers::pi / 4)), expected) < 1e-15);
    const Matrix2 noisy = measurement_cm(GeneralDyneSetting::heterodyne(2.0));
    CHECK(max_diff(noisy, 2.0 * Matrix2::Identity()) == 0.0);
    CHECK(noisy.determinant() == doctest::Approx(4.0));
    CHECK(heisenberg_min_eigenvalue(measurement_cm(GeneralDyneSetting::general(0.1, 1.0))) > -1e-12);
    CHECK_ERROR_KIND(measurement_cm(GeneralDyneSetting::homodyne_at(0.0)), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(GeneralDyneSetting::general(0.0, 0.0), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(GeneralDyneSetting::general(1.5, 0.0), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(GeneralDyneSetting::general(0.5, 0.0, 0.5), ErrorKind::InvalidArgument);
  }

  TEST_CASE("setting recovered from its CM") {
    RngStream rng = make_stream(31, 0);
    for (int k = 0; k < 100; ++k) {
      const double z = std::exp(std::uniform_real_distribution<>(std::log(1e-3), std::log(0.99))(rng));
      const double theta = std::uniform_real_distribution<>(0.0, std::numbers::pi)(rng);
      const double nu = 1.0 + std::uniform_real_distribution<>(0.0, 2.0)(rng);
      const GeneralDyneSetting s = setting_from_cm(measurement_cm(GeneralDyneSetting::general(z, theta, nu)));
      CHECK(s.z_m == doctest::Approx(z).epsilon(1e-9));
      CHECK(s.nu_m == doctest::Approx(nu).epsilon(1e-9));
      const double d = std::abs(s.theta_m - theta);
      CHECK(std::min(d, std::numbers::pi - d) < 1e-8);
    }
  }

  TEST_CASE("inverse sum and the homodyne limit") {
    const Matrix2 th = 3.0 * Matrix2::Identity();
    CHECK(max_diff(inverse_sum(th, GeneralDyneSetting::homodyne_at(0.0)),
                   Matrix2(Eigen::Vector2d(1.0 / 3.0, 0.0).asDiagonal())) < 1e-15);
    CHECK(max_diff(inverse_sum(Matrix2::Identity(), GeneralDyneSetting::heterodyne()), 0.5 * Matrix2::Identity()) <
          1e-15);
    Matrix2 s;
    s << 2.0, 0.4, 0.4, 3.0;
    for (double theta : {0.0, 0.6, 2.0}) {
      const Matrix2 limit = inverse_sum(s, GeneralDyneSetting::homodyne_at(theta));
      const Matrix2 proxy = inverse_sum(s, GeneralDyneSetting::general(1e-8, theta));
      CHECK(max_diff(limit, proxy) < 1e-6);
    }
  }

  TEST_CASE("multimode inverse") {
    RngStream rng = make_stream(32, 0);
    const GaussianState st = random_state(2, rng);
    const std::vector<GeneralDyneSetting> het = {GeneralDyneSetting::general(0.4, 0.3), GeneralDyneSetting::heterodyne()};
    Matrix total = st.covariance();
    total.block(0, 0, 2, 2) += measurement_cm(het[0]);
    total.block(2, 2, 2, 2) += measurement_cm(het[1]);
    CHECK(max_diff(measurement_inverse(st.covariance(), het), total.inverse()) < 1e-12);

    const std::vector<GeneralDyneSetting> hom = {GeneralDyneSetting::homodyne_at(0.7), GeneralDyneSetting::heterodyne()};
    const std::vector<GeneralDyneSetting> proxy = {GeneralDyneSetting::general(1e-9, 0.7), GeneralDyneSetting::heterodyne()};
    CHECK(max_diff(measurement_inverse(st.covariance(), hom), measurement_inverse(st.covariance(), proxy)) < 1e-6);
    CHECK_ERROR_KIND(measurement_inverse(st.covariance(), std::vector<GeneralDyneSetting>{het[0]}),
                     ErrorKind::InvalidDimension);
  }

  TEST_CASE("conditioning examples") {
    const GaussianState prod = product_state();
    const GaussianState c = condition(prod, Partition::two_mode(), GeneralDyneSetting::general(0.3, 0.2), Vector2(1.0, -2.0));
    CHECK(max_diff(c.covariance(), prod.covariance().block(0, 0, 2, 2)) < 1e-15);
    CHECK(max_diff(c.mean(), prod.mean().head(2)) < 1e-15);

    const GaussianState pure = condition(tmsts(0.0, 1.0), Partition::two_mode(), GeneralDyneSetting::heterodyne(),
                                         Vector2::Zero());
    CHECK(max_diff(pure.covariance(), Matrix::Identity(2, 2)) < 1e-12);

    const TwoModeStandardForm sf = tmsts_standard_form(1.0, 0.5);
    const CovarianceMatrix cc = conditional_cm(tmsts(1.0, 0.5), Partition::two_mode(), GeneralDyneSetting::heterodyne());
    CHECK(cc.matrix().determinant() ==
          doctest::Approx(phase_invariant_conditional_det(sf.a, sf.b, sf.c_plus, 1.0)).epsilon(1e-12));
  }

  TEST_CASE("conditional CM is outcome independent, valid and no less pure") {
    RngStream rng = make_stream(33, 0);
    for (int k = 0; k < 1000; ++k) {
      const std::size_t modes = 2 + static_cast<std::size_t>(k % 2);
      const GaussianState st = random_state(modes, rng);
      Partition part;
      part.b_modes = {static_cast<std::size_t>(k) % modes};
      for (std::size_t j = 0; j < modes; ++j) {
        if (j != part.b_modes[0]) part.a_modes.push_back(j);
      }
      const GeneralDyneSetting set = random_setting(rng);
      const GaussianState c1 = condition(st, part, set, sample_outcome(st, part, set, rng));
      const GaussianState c2 = condition(st, part, set, Vector2(5.0, -3.0));
      CHECK(max_diff(c1.covariance(), c2.covariance()) == 0.0);
      CHECK(heisenberg_min_eigenvalue(c1.covariance()) >= -kPsdTol);
      if (modes == 2) {
        const double det_a = st.covariance().block(0, 0, 2, 2).determinant();
        const double det_b = st.covariance().block(2, 2, 2, 2).determinant();
        CHECK(c1.covariance().determinant() <= (part.b_modes[0] == 1 ? det_a : det_b) * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("settings follow symplectic maps of the measured mode") {
    RngStream rng = make_stream(34, 0);
    for (int k = 0; k < 100; ++k) {
      const GaussianState st = random_state(2, rng);
      const Matrix s_b = random_symplectic(1, rng, 1.0);
      Matrix s = Matrix::Identity(4, 4);
      s.block(2, 2, 2, 2) = s_b;
      const GeneralDyneSetting set = random_setting(rng);
      const CovarianceMatrix before = conditional_cm(st, Partition::two_mode(), set);
      const CovarianceMatrix after =
          conditional_cm(apply_symplectic(st, s), Partition::two_mode(), transform_setting(set, s_b));
      CHECK(max_diff(before.matrix(), after.matrix()) < 1e-9 * before.matrix().norm());
    }
  }

  TEST_CASE("outcome statistics") {
    RngStream rng = make_stream(35, 0);
    const Partition part = Partition::two_mode();
    const GaussianState vac = GaussianState::vacuum(2);
    const Moments m = sample_moments([&] { return sample_outcome(vac, part, GeneralDyneSetting::heterodyne(), rng); },
                                     100000);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(std::abs(m.cov(i, j) - (i == j ? 1.0 : 0.0)) < 3.0 * m.se(i, j));
      CHECK(std::abs(m.mean(i)) < 3.0 * std::sqrt(m.cov(i, i) / 100000));
    }

    const GaussianState hot(Vector::LinSpaced(4, 0.5, 2.0),
                            CovarianceMatrix(3.0 * Matrix::Identity(4, 4)));
    const Moments h = sample_moments([&] { return sample_outcome(hot, part, GeneralDyneSetting::heterodyne(), rng); },
                                     100000);
    const Vector2 mean_b = hot.mean().tail(2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(std::abs(h.cov(i, j) - (i == j ? 2.0 : 0.0)) < 3.0 * h.se(i, j));
      CHECK(std::abs(h.mean(i) - mean_b(i)) < 3.0 * std::sqrt(h.cov(i, i) / 100000));
    }
  }

  TEST_CASE("homodyne outcomes lie on the measured axis") {
    RngStream rng = make_stream(36, 0);
    const GaussianState st = tmsts(1.0, 0.4);
    const GeneralDyneSetting set = GeneralDyneSetting::homodyne_at(0.8);
    const Vector2 u = set.direction();
    const Vector2 orth(-u(1), u(0));
    double acc = 0.0;
    double acc2 = 0.0;
    const int n = 50000;
    for (int k = 0; k < n; ++k) {
      const Vector2 x = sample_outcome(st, Partition::two_mode(), set, rng);
      CHECK(std::abs(orth.dot(x)) < 1e-12);
      acc += u.dot(x);
      acc2 += u.dot(x) * u.dot(x);
    }
    const double var = acc2 / n - (acc / n) * (acc / n);
    const double expected = 0.5 * u.dot(Matrix2(st.covariance().block(2, 2, 2, 2)) * u);
    CHECK(std::abs(var - expected) < 3.0 * expected * std::sqrt(2.0 / n));
  }

  TEST_CASE("conditioned means average to the unconditional mean") {
    RngStream rng = make_stream(37, 0);
    const GaussianState st = random_state(2, rng, 2.0, 0.8, 1.5);
    const GeneralDyneSetting set = GeneralDyneSetting::general(0.3, 1.1);
    Vector2 acc = Vector2::Zero();
    Matrix2 acc2 = Matrix2::Zero();
    const int n = 50000;
    for (int k = 0; k < n; ++k) {
      const Vector2 m = condition(st, Partition::two_mode(), set, sample_outcome(st, Partition::two_mode(), set, rng)).mean();
      acc += m;
      acc2 += m * m.transpose();
    }
    const Vector2 avg = acc / n;
    const Matrix2 cov = acc2 / n - avg * avg.transpose();
    for (int i = 0; i < 2; ++i) CHECK(std::abs(avg(i) - st.mean()(i)) < 3.0 * std::sqrt(cov(i, i) / n) + 1e-12);
  }

  TEST_CASE("partition validation") {
    const GaussianState st = GaussianState::vacuum(3);
    CHECK_ERROR_KIND(split(st, Partition{{0}, {1}}), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(split(st, Partition{{0, 1}, {1}}), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(split(st, Partition{{0}, {1, 2}}), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(split(st, Partition{{}, {1}}), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(split(st, Partition{{0, 1}, {3}}), ErrorKind::InvalidArgument);
    CHECK_NOTHROW(split(st, Partition{{2, 0}, {1}}));
  }
}
