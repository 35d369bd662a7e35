#include "helpers.hpp"

#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/opo.hpp"

#include <cmath>
#include <numbers>

using namespace gaussdaemon;

namespace {

const GeneralDyneSetting kHom0 = GeneralDyneSetting::homodyne_at(0.0);
const GeneralDyneSetting kHom90 = GeneralDyneSetting::homodyne_at(std::numbers::pi / 2);
const GeneralDyneSetting kHet = GeneralDyneSetting::heterodyne();

}  // namespace

TEST_SUITE("opo") {
  TEST_CASE("model") {
    const OpoParams p = OpoParams::from_tilde(0.6, 3.0, 5.0, 2.0);
    CHECK(p.chi == doctest::Approx(0.6));
    CHECK(p.n_th == doctest::Approx(1.0));
    CHECK(p.chi_tilde() == doctest::Approx(0.6));
    const DiffusiveModel m = opo_model(p);
    CHECK(m.h_s(0, 1) == doctest::Approx(-0.6));
    CHECK(m.h_s(0, 0) == 0.0);
    CHECK(max_diff(m.c, std::sqrt(2.0) * symplectic_form(1)) < 1e-15);
    CHECK(max_diff(m.sigma_in, 3.0 * Matrix::Identity(2, 2)) == 0.0);
    CHECK(max_diff(opo_initial_state(p).covariance(), 5.0 * Matrix::Identity(2, 2)) == 0.0);

    CHECK_ERROR_KIND(OpoParams::from_tilde(1.0), ErrorKind::Instability);
    CHECK_ERROR_KIND(OpoParams::from_tilde(1.3), ErrorKind::Instability);
    CHECK_ERROR_KIND(OpoParams::from_tilde(0.5, 0.5), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(OpoParams::from_tilde(0.5, 1.0, 0.9), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(OpoParams::from_tilde(0.5, 1.0, 1.0, 0.0), ErrorKind::InvalidArgument);
  }

  TEST_CASE("unconditional steady state") {
    const OpoParams p = OpoParams::from_tilde(0.6);
    CHECK(opo_unconditional_ergotropy(p) == doctest::Approx(0.15625).epsilon(1e-14));
    const GaussianState ss = opo_unconditional_ss(p);
    CHECK(ss.covariance()(0, 0) == doctest::Approx(0.625));
    CHECK(ss.covariance()(1, 1) == doctest::Approx(2.5));
    for (double ct : {0.3, 0.9}) {
      for (double nu : {1.0, 4.0}) {
        const OpoParams q = OpoParams::from_tilde(ct, nu);
        CHECK(opo_unconditional_ergotropy(q) ==
              doctest::Approx(ergotropy(opo_unconditional_ss(q)).ergotropy).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("closed-form conditional steady states match the riccati solver") {
    for (double ct : {0.3, 0.6, 0.9}) {
      for (double nu : {1.0, 2.0, 3.0, 5.0}) {
        const OpoParams p = OpoParams::from_tilde(ct, nu);
        for (const auto& set : {kHom0, kHom90, kHet}) {
          const Matrix closed = opo_conditional_ss(p, set).matrix();
          const ConditionalSteadyState num = steady_state_conditional(opo_monitored(p, set));
          CHECK(max_diff(closed, num.cm.matrix()) < 1e-8 * std::max(1.0, closed.norm()));
          CHECK(riccati_residual(opo_monitored(p, set), closed) < 1e-9 * std::max(1.0, closed.norm()));
        }
      }
    }
  }

  TEST_CASE("optimal squeezing of the measurement") {
    CHECK(opo_zopt(OpoParams::from_tilde(0.6)) == doctest::Approx(0.25));
    CHECK(opo_zopt(OpoParams::from_tilde(0.99)) == doctest::Approx(0.01 / 1.99));
    for (double ct : {0.3, 0.6, 0.9}) {
      // At zero temperature every efficient unravelling purifies the steady state.
      const OpoParams cold = OpoParams::from_tilde(ct);
      for (const auto& set : {kHom0, kHom90, kHet, GeneralDyneSetting::general(opo_zopt(cold), 0.0)}) {
        CHECK(opo_daemonic_ss(cold, set) == doctest::Approx(opo_daemonic_ss_zero_temperature(ct)).epsilon(1e-8));
      }
      const OpoParams p = OpoParams::from_tilde(ct, 3.0);
      const double at_opt = opo_daemonic_ss(p, GeneralDyneSetting::general(opo_zopt(p), 0.0));
      CHECK(at_opt > opo_daemonic_ss(p, kHet));
      CHECK(opo_daemonic_ss(p, kHet) > opo_daemonic_ss(p, kHom0));
      const ScalarMinimum num = opo_zopt_numeric(p);
      CHECK(std::abs(num.x - opo_zopt(p)) < 1e-4);
      CHECK(num.value == doctest::Approx(at_opt).epsilon(1e-8));
    }
  }

  TEST_CASE("heterodyne wins in the steady state of a hot bath") {
    for (double nu : {2.0, 3.0, 5.0}) {
      for (double ct : {0.3, 0.6, 0.9}) {
        const OpoParams p = OpoParams::from_tilde(ct, nu);
        const double het = opo_daemonic_ss(p, kHet);
        const double hom0 = opo_daemonic_ss(p, kHom0);
        CHECK(het > hom0);
        CHECK(hom0 == doctest::Approx(opo_daemonic_ss(p, kHom90)).epsilon(1e-10));
        CHECK(hom0 == doctest::Approx(opo_daemonic_ss(p, GeneralDyneSetting::homodyne_at(std::numbers::pi / 4))).epsilon(1e-8));
        CHECK(hom0 >= opo_unconditional_ergotropy(p) - 1e-12);
      }
    }
  }

  TEST_CASE("homodyne squeezes the measured quadrature") {
    const OpoParams p = OpoParams::from_tilde(0.6, 3.0);
    const Matrix unc = opo_unconditional_ss(p).covariance();
    const Matrix h0 = opo_conditional_ss(p, kHom0).matrix();
    const Matrix h90 = opo_conditional_ss(p, kHom90).matrix();
    CHECK(h0(0, 0) < unc(0, 0));
    CHECK(h0(1, 1) == doctest::Approx(unc(1, 1)));
    CHECK(h90(1, 1) < unc(1, 1));
    CHECK(h90(0, 0) == doctest::Approx(unc(0, 0)));
  }

  TEST_CASE("log grid") {
    const auto g = log_grid(1e-3, 1.0, 4);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == doctest::Approx(1e-3));
    CHECK(g[1] == doctest::Approx(1e-2));
    CHECK(g[3] == 1.0);
    CHECK_ERROR_KIND(log_grid(0.0, 1.0, 3), ErrorKind::InvalidArgument);
  }

  TEST_CASE("z sweep table") {
    const OpoParams p = OpoParams::from_tilde(0.6, 3.0);
    const Table t = figure1_data(p, log_grid(1e-3, 1.0, 7));
    CHECK(t.rows.size() == 8);
    CHECK(t.header == std::vector<std::string>{"z_m", "ergotropy"});
    bool found = false;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      if (k > 0) CHECK(t.rows[k][0] > t.rows[k - 1][0]);
      if (t.rows[k][0] == opo_zopt(p)) {
        found = true;
        CHECK(t.rows[k][1] == doctest::Approx(opo_daemonic_ss(p, GeneralDyneSetting::general(opo_zopt(p), 0.0))).epsilon(1e-8));
        CHECK(t.rows[k][1] > t.rows.back()[1]);
        CHECK(t.rows.back()[1] > t.rows.front()[1]);
      }
    }
    CHECK(found);
    CHECK(t.rows.back()[1] == doctest::Approx(opo_daemonic_ss(p, kHet)).epsilon(1e-12));
  }

  TEST_CASE("transient curves") {
    const OpoParams p = OpoParams::from_tilde(0.6, 3.0, 5.0);
    const TransientCurves c = transient_curves(p, 1e-2, 2.0);
    REQUIRE(c.kappa_t.size() == 201);
    CHECK(c.hom0[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.het[0] == doctest::Approx(0.0).epsilon(1e-14));
    const TransientCurves d = transient_curves(OpoParams::from_tilde(0.6, 3.0, 5.0, 2.0), 1e-2, 2.0);
    for (std::size_t k = 0; k < c.kappa_t.size(); k += 20) {
      CHECK(d.het[k] == doctest::Approx(c.het[k]).epsilon(1e-9));
    }
    const Table t = figure23_data(p, c);
    CHECK(t.rows.size() == c.kappa_t.size());
    CHECK(t.header.size() == 4);
  }

  TEST_CASE("first homodyne overtaking") {
    TransientCurves c;
    c.kappa_t = {0.0, 1.0, 2.0, 3.0};
    c.het = {0.0, 1.0, 1.0, 1.0};
    c.hom0 = {0.0, 0.5, 1.5, 0.5};
    c.hom90 = {0.0, 0.2, 0.2, 2.0};
    const auto x = homodyne_overtakes_heterodyne(c);
    REQUIRE(x.has_value());
    CHECK(*x == doctest::Approx(1.5));
    c.hom0 = {0.0, 0.5, 0.5, 0.5};
    c.hom90 = {0.0, 0.5, 0.5, 0.5};
    CHECK_FALSE(homodyne_overtakes_heterodyne(c).has_value());
  }
}
