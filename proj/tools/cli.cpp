#include "cli.hpp"

#include "gaussdaemon/daemonic.hpp"
#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/error.hpp"
#include "gaussdaemon/invariants.hpp"
#include "gaussdaemon/io.hpp"
#include "gaussdaemon/monitored.hpp"
#include "gaussdaemon/opo.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace gaussdaemon::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240917;
constexpr double kRouteTol = 1e-9;
constexpr double kRiccatiTol = 1e-8;
constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

struct Config {
  std::string command;
  std::string state;
  std::string model;
  std::string out;
  double dt = 1e-3;
  double t_final = 10.0;
  std::size_t n_traj = 1000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  double chi_tilde = 0.8;
  double nu_in = 1.0;
  double nu0 = 5.0;
  double n_thermal = 1.0;
  double r = 0.5;
  std::string strategy;
  double z_m = 1.0;
  double theta_m = 0.0;
  std::size_t points = 50;
  std::size_t cases = 1000;
  std::size_t stride = 100;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Convergence:
    case ErrorKind::NoSteadyState:
    case ErrorKind::Numeric:
    case ErrorKind::StepSize:
      return kExitNumeric;
    default:
      return kExitInvalid;
  }
}

std::uint64_t resolve_seed(const Config& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("GAUSSDAEMON_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Parse, std::string("GAUSSDAEMON_SEED is not an unsigned integer: '") + env + "'");
  }
  return kDefaultSeed;
}

GeneralDyneSetting strategy_setting(const std::string& strategy, const Config& cfg) {
  if (strategy == "hom0") return GeneralDyneSetting::homodyne_at(0.0);
  if (strategy == "hom90") return GeneralDyneSetting::homodyne_at(0.5 * std::numbers::pi);
  if (strategy == "het") return GeneralDyneSetting::heterodyne();
  if (strategy == "gendyne") return GeneralDyneSetting::general(cfg.z_m, cfg.theta_m);
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + strategy + "'");
}

std::string describe(const GeneralDyneSetting& s) {
  std::ostringstream os;
  if (s.homodyne) {
    os << "homodyne theta_m=" << format_number(s.theta_m);
  } else {
    os << "general-dyne z_m=" << format_number(s.z_m) << " theta_m=" << format_number(s.theta_m)
       << " nu_m=" << format_number(s.nu_m);
  }
  return os.str();
}

std::string provenance(const Config& cfg, std::uint64_t seed) {
  std::ostringstream os;
  os << "command=" << cfg.command << " dt=" << format_number(cfg.dt) << " T=" << format_number(cfg.t_final)
     << " chi_tilde=" << format_number(cfg.chi_tilde) << " nu_in=" << format_number(cfg.nu_in)
     << " nu0=" << format_number(cfg.nu0) << " N=" << format_number(cfg.n_thermal) << " r=" << format_number(cfg.r)
     << " strategy=" << (cfg.strategy.empty() ? "-" : cfg.strategy) << " z_m=" << format_number(cfg.z_m)
     << " theta_m=" << format_number(cfg.theta_m) << " points=" << cfg.points << " n_traj=" << cfg.n_traj
     << " seed=" << seed;
  return os.str();
}

// CSV to --out when given, otherwise to `out`. Returns true when a file was written.
bool emit(Table table, const Config& cfg, std::uint64_t seed, std::ostream& out) {
  table.comments.insert(table.comments.begin(), provenance(cfg, seed));
  if (cfg.out.empty()) {
    table.write_csv(out);
    return false;
  }
  std::ofstream file(cfg.out);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + cfg.out + "'");
  table.write_csv(file);
  return true;
}

void print_matrix(std::ostream& out, const std::string& label, const Matrix& m) {
  out << label << " =";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << (i ? " ;" : "");
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << format_number(m(i, j));
  }
  out << "\n";
}

int report_gap(std::ostream& out, const std::string& what, double a, double b, double tol) {
  const double gap = std::abs(a - b);
  out << what << "_gap " << format_number(gap) << "\n";
  if (gap > tol * std::max(1.0, std::abs(a))) {
    out << "DISAGREEMENT: " << what << " routes differ by more than " << format_number(tol) << "\n";
    return kExitNumeric;
  }
  return 0;
}

int cmd_validate(const Config& cfg, std::ostream& out) {
  if (!cfg.state.empty()) {
    const GaussianState st = load_state(cfg.state);
    out << "state " << cfg.state << ": " << st.modes() << " mode(s), min eigenvalue of sigma + i Omega "
        << format_number(heisenberg_min_eigenvalue(st.covariance())) << "\n";
  }
  const std::uint64_t seed = resolve_seed(cfg);
  const InvariantReport report = run_invariant_suite(cfg.cases, seed);
  out << "invariant suite: cases=" << cfg.cases << " seed=" << seed << "\n";
  for (const auto& c : report.checks) {
    out << (c.violations == 0 ? "ok   " : "FAIL ") << c.name << " cases=" << c.cases << " violations=" << c.violations;
    if (c.violations) out << " worst=" << format_number(c.worst) << " first: " << c.first_failure;
    out << "\n";
  }
  return report.ok() ? 0 : kExitInvalid;
}

int cmd_ergotropy(const Config& cfg, std::ostream& out) {
  if (cfg.state.empty()) throw Error(ErrorKind::InvalidArgument, "ergotropy needs --state");
  const GaussianState st = load_state(cfg.state);
  const ErgotropyReport r = ergotropy(st);
  out << "ergotropy " << format_number(r.ergotropy) << "\n";
  out << "energy " << format_number(r.energy) << "\n";
  out << "passive_energy " << format_number(r.passive_energy) << "\n";
  out << "purity " << format_number(purity(st)) << "\n";
  if (st.modes() == 1) {
    const ExtractionUnitary u = extraction_unitary(st);
    print_matrix(out, "extraction_symplectic", u.symplectic);
    print_matrix(out, "extraction_displacement", u.displacement.transpose());
  }
  return 0;
}

int cmd_daemonic(const Config& cfg, std::ostream& out) {
  if (cfg.state.empty()) throw Error(ErrorKind::InvalidArgument, "daemonic needs --state");
  const GaussianState st = load_state(cfg.state);
  if (st.modes() != 2) throw Error(ErrorKind::UnsupportedDimension, "daemonic expects a two-mode state (A = 0, B = 1)");
  const StandardFormReduction red = standard_form(st);
  const TwoModeStandardForm& sf = red.form;
  out << "standard_form a=" << format_number(sf.a) << " z_A=" << format_number(sf.z_a) << " b=" << format_number(sf.b)
      << " c+=" << format_number(sf.c_plus) << " c-=" << format_number(sf.c_minus) << " eta=" << format_number(sf.eta)
      << "\n";
  out << "unconditional_ergotropy " << format_number(ergotropy(reduce(st, std::vector<std::size_t>{0})).ergotropy)
      << "\n";

  GeneralDyneSetting setting;
  double closed = 0.0;
  if (cfg.strategy.empty()) {
    const DaemonicResult best = max_daemonic(sf, red.mean_a);
    out << "heterodyne " << format_number(daemonic_heterodyne(sf, red.mean_a).value) << "\n";
    out << "best_homodyne " << format_number(max_daemonic_homodyne(sf, red.mean_a).value) << "\n";
    setting = transform_setting(best.setting, red.s_b.inverse());
    closed = best.value;
  } else {
    setting = strategy_setting(cfg.strategy, cfg);
    closed = daemonic_closed_form(sf, red.mean_a, transform_setting(setting, red.s_b)).value;
  }
  const DaemonicResult pipeline = daemonic_ergotropy(st, setting);
  out << "setting " << describe(setting) << "\n";
  out << "closed_form " << format_number(closed) << "\n";
  out << "pipeline " << format_number(pipeline.value) << "\n";
  out << "conditional_purity " << format_number(pipeline.conditional_purity) << "\n";
  return report_gap(out, "daemonic", closed, pipeline.value, kRouteTol);
}

int cmd_tmsts(const Config& cfg, std::ostream& out) {
  const std::string strategy = cfg.strategy.empty() ? "het" : cfg.strategy;
  const GeneralDyneSetting setting = strategy_setting(strategy, cfg);
  const TwoModeStandardForm sf = tmsts_standard_form(cfg.n_thermal, cfg.r);
  const GaussianState st = sf.to_state();
  double closed = 0.0;
  if (strategy == "het") {
    closed = tmsts_daemonic_heterodyne(cfg.n_thermal, cfg.r);
  } else if (strategy == "gendyne") {
    closed = sf.energy_a() - 0.5 * std::sqrt(phase_invariant_conditional_det(sf.a, sf.b, sf.c_plus, cfg.z_m));
  } else {
    closed = tmsts_daemonic_homodyne(cfg.n_thermal, cfg.r);
  }
  const double pipeline = daemonic_ergotropy(st, setting).value;
  out << "tmsts N=" << format_number(cfg.n_thermal) << " r=" << format_number(cfg.r) << " " << describe(setting) << "\n";
  out << "closed_form " << format_number(closed) << "\n";
  out << "pipeline " << format_number(pipeline) << "\n";
  const int status = report_gap(out, "daemonic", closed, pipeline, kRouteTol);

  if (!cfg.out.empty()) {
    Table t;
    t.header = {"z_m", "ergotropy"};
    for (double z : log_grid(1e-6, 1.0, cfg.points)) {
      t.rows.push_back({z, daemonic_ergotropy(st, GeneralDyneSetting::general(z, cfg.theta_m)).value});
    }
    t.comments = {"tmsts N=" + format_number(cfg.n_thermal) + " r=" + format_number(cfg.r)};
    emit(std::move(t), cfg, resolve_seed(cfg), out);
    out << "sweep written to " << cfg.out << "\n";
  }
  return status;
}

OpoParams opo_params(const Config& cfg) { return OpoParams::from_tilde(cfg.chi_tilde, cfg.nu_in, cfg.nu0); }

int cmd_opo_ss(const Config& cfg, std::ostream& out) {
  const OpoParams p = opo_params(cfg);
  const GeneralDyneSetting setting = strategy_setting(cfg.strategy.empty() ? "het" : cfg.strategy, cfg);
  const GaussianState unc = opo_unconditional_ss(p);
  const GaussianState lyap = steady_state_unconditional(drift_diffusion(opo_model(p)));
  print_matrix(out, "sigma_unconditional", unc.covariance());
  out << "unconditional_ergotropy " << format_number(opo_unconditional_ergotropy(p)) << "\n";
  int status = report_gap(out, "lyapunov", unc.covariance()(1, 1), lyap.covariance()(1, 1), 1e-10);

  const CovarianceMatrix closed = opo_conditional_ss(p, setting);
  const ConditionalSteadyState numeric = steady_state_conditional(opo_monitored(p, setting));
  out << "setting " << describe(setting) << "\n";
  print_matrix(out, "sigma_conditional", closed.matrix());
  print_matrix(out, "sigma_conditional_riccati", numeric.cm.matrix());
  out << "riccati_residual " << format_number(numeric.residual) << "\n";
  out << "det_conditional " << format_number(closed.matrix().determinant()) << "\n";
  out << "daemonic_ergotropy " << format_number(opo_daemonic_ss(p, setting)) << "\n";
  out << "z_opt " << format_number(opo_zopt(p)) << "\n";
  const int riccati = report_gap(out, "riccati", max_abs(closed.matrix()),
                                 max_abs(closed.matrix()) + max_abs(closed.matrix() - numeric.cm.matrix()), kRiccatiTol);
  return status ? status : riccati;
}

int cmd_opo_transient(const Config& cfg, std::ostream& out) {
  const OpoParams p = opo_params(cfg);
  const TransientCurves c = transient_curves(p, cfg.dt, cfg.t_final);
  const bool to_file = emit(figure23_data(p, c), cfg, resolve_seed(cfg), out);
  if (to_file) {
    const auto x = homodyne_overtakes_heterodyne(c);
    out << "rows " << c.kappa_t.size() << " written to " << cfg.out << "\n";
    out << "homodyne_overtakes_heterodyne_at " << (x ? format_number(*x) : std::string("none")) << "\n";
    out << "final hom0=" << format_number(c.hom0.back()) << " hom90=" << format_number(c.hom90.back())
        << " het=" << format_number(c.het.back()) << "\n";
  }
  return 0;
}

int cmd_opo_zsweep(const Config& cfg, std::ostream& out) {
  const OpoParams p = opo_params(cfg);
  const bool to_file = emit(figure1_data(p, log_grid(1e-6, 1.0, cfg.points)), cfg, resolve_seed(cfg), out);
  if (to_file) {
    const ScalarMinimum numeric = opo_zopt_numeric(p);
    out << "z_opt " << format_number(opo_zopt(p)) << "\n";
    out << "z_opt_numeric " << format_number(numeric.x) << " ergotropy " << format_number(numeric.value) << "\n";
    out << "heterodyne " << format_number(opo_daemonic_ss(p, GeneralDyneSetting::heterodyne())) << "\n";
  }
  return 0;
}

int cmd_trajectories(const Config& cfg, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(cfg);
  MonitoredModel mm;
  GaussianState initial = GaussianState::vacuum(1);
  if (!cfg.model.empty()) {
    const ModelFile mf = load_model(cfg.model);
    std::vector<GeneralDyneSetting> settings = mf.settings;
    if (!cfg.strategy.empty()) settings.assign(mf.model.env_modes(), strategy_setting(cfg.strategy, cfg));
    if (settings.empty()) settings.assign(mf.model.env_modes(), GeneralDyneSetting::heterodyne());
    mm = monitor(mf.model, settings);
    initial = GaussianState::vacuum(mf.model.modes());
  } else {
    const OpoParams p = opo_params(cfg);
    mm = opo_monitored(p, strategy_setting(cfg.strategy.empty() ? "het" : cfg.strategy, cfg));
    initial = opo_initial_state(p);
  }
  if (!cfg.state.empty()) initial = load_state(cfg.state);

  TrajectoryOptions opts;
  opts.save_stride = cfg.stride;
  opts.threads = cfg.threads;
  const TrajectoryBatch batch = simulate_trajectories(mm, initial, cfg.dt, cfg.t_final, cfg.n_traj, seed, opts);
  const UnconditionalPath unc = evolve_unconditional(mm.dd, initial, batch.times, cfg.dt);

  const auto dim = static_cast<Eigen::Index>(batch.dim);
  Table t;
  t.header = {"t"};
  for (Eigen::Index i = 0; i < dim; ++i) t.header.push_back("mean_" + std::to_string(i));
  for (const char* name : {"sigma_c", "Sigma", "sigma_unc"}) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i; j < dim; ++j) t.header.push_back(std::string(name) + "_" + std::to_string(i) + std::to_string(j));
    }
  }
  const bool enough = batch.n_traj >= 2;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < batch.times.size(); ++k) {
    std::vector<double> row{batch.times[k]};
    const Vector mu = ensemble_mean(batch, k);
    for (Eigen::Index i = 0; i < dim; ++i) row.push_back(mu(i));
    const Matrix sigma = enough ? excess_noise(batch, k) : Matrix::Zero(dim, dim);
    for (const Matrix* m : {&batch.sigma_c[k].matrix(), &sigma, &unc.cms[k].matrix()}) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = i; j < dim; ++j) row.push_back((*m)(i, j));
      }
    }
    t.rows.push_back(std::move(row));
    if (enough && k + 1 == batch.times.size()) {
      const Matrix se = excess_noise_standard_error(batch, k);
      const Vector se_mu = ensemble_mean_standard_error(batch, k);
      const Matrix gap = batch.sigma_c[k].matrix() + sigma - unc.cms[k].matrix();
      for (Eigen::Index i = 0; i < dim; ++i) {
        worst_z = std::max(worst_z, std::abs(mu(i) - unc.means[k](i)) / std::max(se_mu(i), 1e-300));
        for (Eigen::Index j = 0; j < dim; ++j) worst_z = std::max(worst_z, std::abs(gap(i, j)) / std::max(se(i, j), 1e-300));
      }
    }
  }
  t.comments = {"settings " + describe(mm.settings.front()), "seed=" + std::to_string(seed)};
  if (emit(std::move(t), cfg, seed, out)) {
    out << "trajectories " << batch.n_traj << " steps " << std::llround(cfg.t_final / cfg.dt) << " saved "
        << batch.times.size() << " seed " << seed << "\n";
    if (enough) out << "final_max_standard_errors " << format_number(worst_z) << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Work extraction from Gaussian states under general-dyne measurement"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // One configuration per command so that each command carries its own defaults.
  std::vector<std::unique_ptr<Config>> configs;
  std::vector<std::pair<CLI::App*, std::function<int(const Config&, std::ostream&)>>> commands;
  auto command = [&](const std::string& name, const std::string& help, auto handler, auto set_defaults) {
    configs.push_back(std::make_unique<Config>());
    Config& cfg = *configs.back();
    set_defaults(cfg);
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, handler);
    return std::pair<CLI::App*, Config*>{sub, &cfg};
  };
  auto no_defaults = [](Config&) {};

  auto seed_opt = [](CLI::App* sub, Config& cfg) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&cfg](const std::uint64_t& v) { cfg.seed = v; },
        "master seed (fallback: GAUSSDAEMON_SEED, then " + std::to_string(kDefaultSeed) + ")");
  };
  auto opo_opts = [](CLI::App* sub, Config& cfg) {
    sub->add_option("--chi-tilde", cfg.chi_tilde, "2 chi / kappa, in [0, 1)");
    sub->add_option("--nu-in", cfg.nu_in, "bath noise 2 n_th + 1");
    sub->add_option("--nu0", cfg.nu0, "initial thermal CM scale");
  };
  auto strategy_opts = [](CLI::App* sub, Config& cfg) {
    sub->add_option("--strategy", cfg.strategy, "measurement: hom0, hom90, het or gendyne")
        ->check(CLI::IsMember({"hom0", "hom90", "het", "gendyne"}));
    sub->add_option("--z-m", cfg.z_m, "general-dyne squeezing z_m in (0, 1]");
    sub->add_option("--theta-m", cfg.theta_m, "general-dyne phase");
  };

  {
    auto [sub, cfg] = command("validate", "run the randomized invariant suite", cmd_validate, no_defaults);
    sub->add_option("--state", cfg->state, "optional state file to check first");
    sub->add_option("--cases", cfg->cases, "cases per invariant");
    seed_opt(sub, *cfg);
  }
  {
    auto [sub, cfg] = command("ergotropy", "ergotropy of a state file", cmd_ergotropy, no_defaults);
    sub->add_option("--state", cfg->state, "state file")->required();
  }
  {
    auto [sub, cfg] = command("daemonic", "daemonic ergotropy of a two-mode state (mode 1 measured)", cmd_daemonic,
                              no_defaults);
    sub->add_option("--state", cfg->state, "state file")->required();
    strategy_opts(sub, *cfg);
  }
  {
    auto [sub, cfg] = command("tmsts-sweep", "two-mode squeezed thermal state: closed form vs pipeline", cmd_tmsts,
                              no_defaults);
    sub->add_option("--N", cfg->n_thermal, "thermal occupation of the seed");
    sub->add_option("--r", cfg->r, "two-mode squeezing");
    sub->add_option("--points", cfg->points, "z_m grid points");
    sub->add_option("--out", cfg->out, "CSV of the z_m sweep");
    strategy_opts(sub, *cfg);
  }
  {
    auto [sub, cfg] = command("opo-ss", "OPO steady states", cmd_opo_ss, [](Config& c) { c.chi_tilde = 0.6; });
    opo_opts(sub, *cfg);
    strategy_opts(sub, *cfg);
  }
  {
    auto [sub, cfg] = command("opo-transient", "OPO transient daemonic ergotropy (hom0, hom90, het)",
                              cmd_opo_transient, no_defaults);
    opo_opts(sub, *cfg);
    sub->add_option("--dt", cfg->dt, "time step (1/kappa)");
    sub->add_option("--T", cfg->t_final, "final time (1/kappa)");
    sub->add_option("--out", cfg->out, "CSV output (stdout if absent)");
  }
  {
    auto [sub, cfg] = command("opo-zsweep", "OPO steady-state daemonic ergotropy against z_m", cmd_opo_zsweep,
                              [](Config& c) {
                                c.chi_tilde = 0.99;
                                c.nu_in = 3.0;
                                c.points = 100;
                              });
    sub->add_option("--chi-tilde", cfg->chi_tilde, "2 chi / kappa, in [0, 1)");
    sub->add_option("--nu-in", cfg->nu_in, "bath noise 2 n_th + 1");
    sub->add_option("--points", cfg->points, "z_m grid points");
    sub->add_option("--out", cfg->out, "CSV output (stdout if absent)");
  }
  {
    auto [sub, cfg] = command("trajectories", "conditional trajectories and excess noise", cmd_trajectories,
                              [](Config& c) {
                                c.chi_tilde = 0.6;
                                c.nu_in = 3.0;
                                c.t_final = 3.0;
                              });
    sub->add_option("--model", cfg->model, "model file (OPO when absent)");
    sub->add_option("--state", cfg->state, "initial state file");
    opo_opts(sub, *cfg);
    sub->add_option("--dt", cfg->dt, "time step");
    sub->add_option("--T", cfg->t_final, "final time");
    sub->add_option("--n-traj", cfg->n_traj, "number of trajectories");
    sub->add_option("--threads", cfg->threads, "worker threads (results do not depend on it)");
    sub->add_option("--stride", cfg->stride, "save every this many steps");
    sub->add_option("--out", cfg->out, "CSV output (stdout if absent)");
    strategy_opts(sub, *cfg);
    seed_opt(sub, *cfg);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInvalid;
  }

  for (std::size_t k = 0; k < commands.size(); ++k) {
    auto& [sub, handler] = commands[k];
    if (!sub->parsed()) continue;
    Config& cfg = *configs[k];
    cfg.command = sub->get_name();
    try {
      return handler(cfg, out);
    } catch (const Error& e) {
      err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
      return exit_code(e.kind());
    }
  }
  return kExitInvalid;
}

}  // namespace gaussdaemon::cli
