#include "helpers.hpp"

#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/random_states.hpp"

#include <cmath>

using namespace gaussdaemon;

namespace {

GaussianState single(double nu, double z, double phi, Vector2 mean = Vector2::Zero()) {
  const Matrix2 r = rotation(phi);
  const Matrix2 sq = squeezer(z * z);
  return GaussianState(mean, CovarianceMatrix::from_computed(nu * r * sq * r.transpose()));
}

}  // namespace

TEST_SUITE("ergotropy") {
  TEST_CASE("examples") {
    CHECK(ergotropy(GaussianState::thermal(3.0)).ergotropy == 0.0);
    const ErgotropyReport coherent = ergotropy(GaussianState(Vector2(1.0, 1.0), CovarianceMatrix(Matrix::Identity(2, 2))));
    CHECK(coherent.ergotropy == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ergotropy(single(2.0, 2.0, 0.0)).ergotropy == doctest::Approx(1.125).epsilon(1e-12));
  }

  TEST_CASE("report invariants") {
    RngStream rng = make_stream(21, 0);
    for (int k = 0; k < 200; ++k) {
      const GaussianState st = random_state(1 + static_cast<std::size_t>(k % 3), rng);
      const ErgotropyReport r = ergotropy(st);
      CHECK(r.ergotropy == doctest::Approx(r.energy - r.passive_energy).epsilon(1e-12));
      CHECK(r.ergotropy >= -1e-9);
      if (st.modes() == 1) {
        CHECK(r.ergotropy == doctest::Approx(r.energy - 0.5 / purity(st)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("phase invariance and zero contribution from thermal noise") {
    const GaussianState st = single(1.7, 1.8, 0.4);
    for (double phi : {0.3, 1.1, 2.5}) {
      CHECK(ergotropy(apply_symplectic(st, rotation(phi))).ergotropy ==
            doctest::Approx(ergotropy(st).ergotropy).epsilon(1e-9));
    }
    for (double nu : {1.0, 2.0, 7.5}) CHECK(ergotropy(single(nu, 1.0, 0.0)).ergotropy == 0.0);
  }

  TEST_CASE("monotone in squeezing") {
    double previous = -1.0;
    for (double z : {1.0, 1.5, 2.0, 3.0}) {
      const double w = ergotropy(single(2.0, z, 0.0)).ergotropy;
      CHECK(w > previous);
      CHECK(w == doctest::Approx(2.0 * (z * z + 1.0 / (z * z) - 2.0) / 4.0).epsilon(1e-12));
      previous = w;
    }
  }

  TEST_CASE("extraction unitary examples") {
    const ExtractionUnitary passive = extraction_unitary(GaussianState::thermal(2.0));
    CHECK(max_diff(passive.symplectic, Matrix2::Identity()) < 1e-15);
    CHECK(passive.displacement.norm() == 0.0);

    const GaussianState sq(Vector2::Zero(), CovarianceMatrix(Matrix2(Eigen::Vector2d(4.0, 0.25).asDiagonal())));
    const ExtractionUnitary u = extraction_unitary(sq);
    CHECK(max_diff(u.symplectic, Matrix2(Eigen::Vector2d(0.5, 2.0).asDiagonal())) < 1e-12);
    CHECK(u.displacement.norm() < 1e-15);

    CHECK_ERROR_KIND(extraction_unitary(GaussianState::vacuum(2)), ErrorKind::UnsupportedDimension);
  }

  TEST_CASE("extraction unitary leaves a passive state") {
    RngStream rng = make_stream(22, 0);
    for (int k = 0; k < 200; ++k) {
      const GaussianState st = random_state(1, rng, 3.0, 1.5, 2.0);
      const ExtractionUnitary u = extraction_unitary(st);
      CHECK(is_symplectic(u.symplectic, 1e-10));
      const GaussianState out = displace(apply_symplectic(st, u.symplectic), u.displacement);
      const double nu = symplectic_eigenvalues(st.cm()).values[0];
      CHECK(max_diff(out.covariance(), nu * Matrix::Identity(2, 2)) < 1e-9 * nu);
      CHECK(out.mean().norm() < 1e-9);
      CHECK(std::abs(ergotropy(out).ergotropy) < 1e-9);
    }
  }

  TEST_CASE("normal form reconstructs the CM") {
    RngStream rng = make_stream(23, 0);
    for (int k = 0; k < 100; ++k) {
      const GaussianState st = random_state(1, rng);
      const SingleModeNormalForm nf = single_mode_normal_form(st.cm());
      CHECK(nf.z >= 1.0);
      const Matrix2 r = rotation(nf.phi);
      const Matrix2 rebuilt = nf.nu * r * squeezer(nf.z * nf.z) * r.transpose();
      CHECK(max_diff(rebuilt, st.covariance()) < 1e-10 * st.covariance().norm());
    }
  }

  TEST_CASE("classical mixing of displacements does not raise ergotropy") {
    // Average over a Gaussian ensemble of displacements against the ergotropy of
    // its Gaussian envelope sigma + 2 C.
    const GaussianState base = single(1.5, 1.4, 0.3);
    Matrix2 c;
    c << 0.8, 0.3, 0.3, 0.5;
    const Eigen::LLT<Matrix2> llt(c);
    RngStream rng = make_stream(24, 0);
    std::normal_distribution<double> normal;
    double acc = 0.0;
    const int samples = 10000;
    for (int k = 0; k < samples; ++k) {
      const Vector2 shift = Vector2(0.4, -0.2) + llt.matrixL() * Vector2(normal(rng), normal(rng));
      acc += ergotropy(GaussianState(shift, base.cm())).ergotropy;
    }
    const GaussianState envelope(Vector2(0.4, -0.2), CovarianceMatrix::from_computed(base.covariance() + 2.0 * c));
    CHECK(acc / samples >= ergotropy(envelope).ergotropy);
  }
}
