#include "gaussdaemon/opo.hpp"

#include "gaussdaemon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gaussdaemon {

namespace {

constexpr double kLogZMin = -13.815510557964274;  // log(1e-6)
constexpr double kPhaseTol = 1e-12;

double phase_mod_pi(double theta) {
  theta = std::fmod(theta, std::numbers::pi);
  return theta < 0.0 ? theta + std::numbers::pi : theta;
}

bool near_phase(double theta, double target) {
  const double d = std::abs(phase_mod_pi(theta) - target);
  return d < kPhaseTol || std::abs(d - std::numbers::pi) < kPhaseTol;
}

// Positive root of x^2 + q x - nu = 0 (heterodyne steady-state variance).
double heterodyne_variance(double nu, double sign_chi) {
  const double q = (1.0 + sign_chi) * (nu + 1.0) - 2.0 * nu;
  return 0.5 * (-q + std::sqrt(q * q + 4.0 * nu));
}

std::string kv(const std::string& key, double value) { return key + "=" + format_number(value); }

}  // namespace

void OpoParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(ErrorKind::InvalidArgument, "OPO: kappa must be positive");
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) throw Error(ErrorKind::InvalidArgument, "OPO: n_th must be >= 0");
  if (!(nu0 >= 1.0) || !std::isfinite(nu0)) throw Error(ErrorKind::InvalidArgument, "OPO: nu0 must be >= 1");
  const double ct = chi_tilde();
  if (!(ct >= 0.0)) throw Error(ErrorKind::InvalidArgument, "OPO: chi must be non-negative");
  if (!(ct < 1.0)) {
    std::ostringstream os;
    os << "OPO above threshold: 2 chi / kappa = " << ct << " >= 1";
    throw Error(ErrorKind::Instability, os.str());
  }
}

OpoParams OpoParams::from_tilde(double chi_tilde, double nu_in, double nu0, double kappa) {
  OpoParams p;
  p.kappa = kappa;
  p.chi = 0.5 * chi_tilde * kappa;
  p.n_th = 0.5 * (nu_in - 1.0);
  p.nu0 = nu0;
  p.validate();
  return p;
}

DiffusiveModel opo_model(const OpoParams& p) {
  p.validate();
  DiffusiveModel m;
  m.h_s = Matrix(2, 2);
  m.h_s << 0.0, -p.chi, -p.chi, 0.0;
  m.c = std::sqrt(p.kappa) * symplectic_form(1);
  m.sigma_in = p.nu_in() * Matrix::Identity(2, 2);
  m.mean_in = Vector::Zero(2);
  return m;
}

MonitoredModel opo_monitored(const OpoParams& p, const GeneralDyneSetting& setting) {
  return monitor(opo_model(p), setting);
}

GaussianState opo_initial_state(const OpoParams& p) {
  p.validate();
  return GaussianState::thermal(p.nu0, 1);
}

GaussianState opo_unconditional_ss(const OpoParams& p) {
  p.validate();
  const double ct = p.chi_tilde();
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = p.nu_in() / (1.0 + ct);
  s(1, 1) = p.nu_in() / (1.0 - ct);
  return GaussianState(Vector::Zero(2), CovarianceMatrix::from_computed(s));
}

double opo_unconditional_ergotropy(const OpoParams& p) {
  p.validate();
  const double g = 1.0 - p.chi_tilde() * p.chi_tilde();
  return 0.5 * p.nu_in() * (1.0 / g - 1.0 / std::sqrt(g));
}

CovarianceMatrix opo_conditional_ss(const OpoParams& p, const GeneralDyneSetting& setting) {
  p.validate();
  setting.validate();
  const double ct = p.chi_tilde();
  const double nu = p.nu_in();
  Matrix s = Matrix::Zero(2, 2);
  if (setting.homodyne && near_phase(setting.theta_m, 0.0)) {
    s(0, 0) = nu * (1.0 - ct);
    s(1, 1) = nu / (1.0 - ct);
  } else if (setting.homodyne && near_phase(setting.theta_m, 0.5 * std::numbers::pi)) {
    s(0, 0) = nu / (1.0 + ct);
    s(1, 1) = nu * (1.0 + ct);
  } else if (!setting.homodyne && setting.z_m == 1.0 && std::abs(setting.nu_m - 1.0) <= kPsdTol) {
    s(0, 0) = heterodyne_variance(nu, ct);
    s(1, 1) = heterodyne_variance(nu, -ct);
  } else {
    return steady_state_conditional(opo_monitored(p, setting)).cm;
  }
  return CovarianceMatrix::from_computed(s);
}

double opo_daemonic_ss(const OpoParams& p, const GeneralDyneSetting& setting) {
  const double e = energy(opo_unconditional_ss(p));
  return e - 0.5 * symplectic_eigenvalues(opo_conditional_ss(p, setting)).sum();
}

double opo_daemonic_ss_zero_temperature(double chi_tilde) {
  return chi_tilde * chi_tilde / (2.0 * (1.0 - chi_tilde * chi_tilde));
}

double opo_zopt(const OpoParams& p) {
  p.validate();
  return (1.0 - p.chi_tilde()) / (1.0 + p.chi_tilde());
}

ScalarMinimum opo_zopt_numeric(const OpoParams& p) {
  p.validate();
  const DiffusiveModel model = opo_model(p);
  const double e = energy(opo_unconditional_ss(p));
  auto negative_work = [&](double log_z) {
    const MonitoredModel mm = monitor(model, GeneralDyneSetting::general(std::min(1.0, std::exp(log_z)), 0.0));
    return -(e - 0.5 * symplectic_eigenvalues(steady_state_conditional(mm).cm).sum());
  };
  const ScalarMinimum best = bracketed_minimize(negative_work, kLogZMin, 0.0, 15, 1e-7);
  return ScalarMinimum{std::min(1.0, std::exp(best.x)), -best.value};
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) {
    throw Error(ErrorKind::InvalidArgument, "log_grid: need 0 < lo <= hi and at least one point");
  }
  std::vector<double> out;
  if (points == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < points; ++k) {
    out.push_back(k + 1 == points ? hi : std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1)));
  }
  return out;
}

Table figure1_data(const OpoParams& p, const std::vector<double>& z_grid) {
  p.validate();
  const DiffusiveModel model = opo_model(p);
  const double e = energy(opo_unconditional_ss(p));
  auto work_at = [&](double z) {
    if (z == 1.0) return opo_daemonic_ss(p, GeneralDyneSetting::heterodyne());
    const MonitoredModel mm = monitor(model, GeneralDyneSetting::general(z, 0.0));
    return e - 0.5 * symplectic_eigenvalues(steady_state_conditional(mm).cm).sum();
  };

  const double z_opt = opo_zopt(p);
  std::vector<double> zs = z_grid;
  zs.push_back(z_opt);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

  Table t;
  t.header = {"z_m", "ergotropy"};
  double at_opt = 0.0;
  for (double z : zs) {
    const double w = work_at(z);
    if (z == z_opt) at_opt = w;
    t.rows.push_back({z, w});
  }
  const double het = opo_daemonic_ss(p, GeneralDyneSetting::heterodyne());
  const double hom = opo_daemonic_ss(p, GeneralDyneSetting::homodyne_at(0.0));
  t.comments = {kv("chi_tilde", p.chi_tilde()),
                kv("nu_in", p.nu_in()),
                kv("kappa", p.kappa),
                "theta_m=0",
                kv("z_opt", z_opt) + " " + kv("ergotropy_at_z_opt", at_opt),
                kv("heterodyne", het),
                kv("homodyne", hom),
                kv("unconditional", opo_unconditional_ergotropy(p))};
  return t;
}

TransientCurves transient_curves(const OpoParams& p, double dt, double t_final) {
  p.validate();
  if (!(dt > 0.0) || !(t_final > 0.0)) throw Error(ErrorKind::InvalidArgument, "transient: need dt > 0 and T > 0");
  TransientCurves c;
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  std::vector<double> t_grid;
  for (std::size_t k = 0; k <= steps; ++k) {
    c.kappa_t.push_back(dt * static_cast<double>(k));
    t_grid.push_back(c.kappa_t.back() / p.kappa);
  }
  const GaussianState init = opo_initial_state(p);
  const DiffusiveModel model = opo_model(p);
  const double h = dt / p.kappa;
  c.hom0 = daemonic_ergotropy_curve(monitor(model, GeneralDyneSetting::homodyne_at(0.0)), init, t_grid, h);
  c.hom90 = daemonic_ergotropy_curve(monitor(model, GeneralDyneSetting::homodyne_at(0.5 * std::numbers::pi)),
                                     init, t_grid, h);
  c.het = daemonic_ergotropy_curve(monitor(model, GeneralDyneSetting::heterodyne()), init, t_grid, h);
  return c;
}

std::optional<double> homodyne_overtakes_heterodyne(const TransientCurves& c) {
  auto gap = [&](std::size_t k) { return std::max(c.hom0[k], c.hom90[k]) - c.het[k]; };
  for (std::size_t k = 1; k < c.kappa_t.size(); ++k) {
    const double g0 = gap(k - 1);
    const double g1 = gap(k);
    if (g0 < 0.0 && g1 >= 0.0) {
      return c.kappa_t[k - 1] + (c.kappa_t[k] - c.kappa_t[k - 1]) * (-g0) / (g1 - g0);
    }
  }
  return std::nullopt;
}

Table figure23_data(const OpoParams& p, const TransientCurves& c) {
  Table t;
  t.header = {"kappa_t", "hom0", "hom90", "het"};
  for (std::size_t k = 0; k < c.kappa_t.size(); ++k) t.rows.push_back({c.kappa_t[k], c.hom0[k], c.hom90[k], c.het[k]});
  t.comments = {kv("chi_tilde", p.chi_tilde()), kv("nu_in", p.nu_in()), kv("nu0", p.nu0), kv("kappa", p.kappa)};
  if (c.kappa_t.size() > 1) {
    t.comments.push_back(kv("dt", c.kappa_t[1] - c.kappa_t[0]) + " " + kv("T", c.kappa_t.back()));
  }
  t.comments.push_back(kv("steady_hom0", opo_daemonic_ss(p, GeneralDyneSetting::homodyne_at(0.0))) + " " +
                       kv("steady_hom90", opo_daemonic_ss(p, GeneralDyneSetting::homodyne_at(0.5 * std::numbers::pi))) +
                       " " + kv("steady_het", opo_daemonic_ss(p, GeneralDyneSetting::heterodyne())));
  if (const auto x = homodyne_overtakes_heterodyne(c)) {
    t.comments.push_back(kv("homodyne_overtakes_heterodyne_at", *x));
  } else {
    t.comments.push_back("homodyne_overtakes_heterodyne_at=none");
  }
  return t;
}

}  // namespace gaussdaemon
