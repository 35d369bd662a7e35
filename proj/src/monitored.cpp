#include "gaussdaemon/monitored.hpp"

#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace gaussdaemon {

namespace {

constexpr std::size_t kSteadyStepCap = 10'000'000;
constexpr std::size_t kRestepEvery = 1000;
constexpr double kSteadyTol = 1e-12;
constexpr double kAlgebraicTol = 1e-9;
constexpr double kLyapunovTol = 1e-10;

// The pieces of the Riccati right-hand side; an unmonitored flow has B, E with
// zero columns.
struct Flow {
  Matrix a;
  Matrix d;
  Matrix b;
  Matrix e;

  Matrix rhs(const Matrix& s) const {
    const Matrix g = e - s * b;
    return a * s + s * a.transpose() + d - g * g.transpose();
  }

  Matrix rk4(const Matrix& s, double h) const {
    const Matrix k1 = rhs(s);
    const Matrix k2 = rhs(s + 0.5 * h * k1);
    const Matrix k3 = rhs(s + 0.5 * h * k2);
    const Matrix k4 = rhs(s + h * k3);
    return symmetrized(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
};

Flow unmonitored_flow(const DriftDiffusion& dd) {
  const auto n = dd.a.rows();
  return Flow{dd.a, dd.d, Matrix::Zero(n, 0), Matrix::Zero(n, 0)};
}

Flow monitored_flow(const MonitoredModel& mm) { return Flow{mm.dd.a, mm.dd.d, mm.b, mm.e}; }

void check_step(const Matrix& s, double h, double t) {
  if (!s.allFinite() || heisenberg_min_eigenvalue(s) < -kPsdTol) {
    std::ostringstream os;
    os << "covariance matrix left the physical set at t = " << t << " with step " << h
       << "; refine the time step";
    throw Error(ErrorKind::StepSize, os.str());
  }
}

std::size_t substeps(double span, double max_dt) {
  if (!(max_dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / max_dt - 1e-9)));
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty time grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!std::isfinite(t_grid[k]) || t_grid[k] < 0.0 || (k > 0 && t_grid[k] < t_grid[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "time grid must be finite, non-negative and non-decreasing");
    }
  }
}

// Grid evolution of a CM under `flow`, starting at t = 0 from s0.
std::vector<CovarianceMatrix> integrate_cm(const Flow& flow, const Matrix& s0, std::span<const double> t_grid,
                                           double max_dt) {
  check_grid(t_grid);
  std::vector<CovarianceMatrix> out;
  out.reserve(t_grid.size());
  Matrix s = s0;
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0.0) {
      const std::size_t steps = substeps(span, max_dt);
      const double h = span / static_cast<double>(steps);
      for (std::size_t k = 0; k < steps; ++k) {
        s = flow.rk4(s, h);
        check_step(s, h, t + h * static_cast<double>(k + 1));
      }
      t = target;
    }
    out.push_back(CovarianceMatrix::from_computed(s));
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Matrix block_diagonal(const std::vector<Matrix2>& blocks) {
  const auto n = static_cast<Eigen::Index>(2 * blocks.size());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out.block<2, 2>(static_cast<Eigen::Index>(2 * j), static_cast<Eigen::Index>(2 * j)) = blocks[j];
  }
  return out;
}

}  // namespace

void DiffusiveModel::validate() const {
  const auto n2 = h_s.rows();
  if (n2 == 0 || n2 % 2 != 0 || h_s.cols() != n2) {
    throw Error(ErrorKind::InvalidDimension, "model: H_S must be square with even dimension");
  }
  const auto m2 = sigma_in.rows();
  if (m2 % 2 != 0 || sigma_in.cols() != m2) {
    throw Error(ErrorKind::InvalidDimension, "model: sigma_in must be square with even dimension");
  }
  if (c.rows() != n2 || c.cols() != m2) {
    std::ostringstream os;
    os << "model: C must be " << n2 << " x " << m2 << ", got " << c.rows() << " x " << c.cols();
    throw Error(ErrorKind::InvalidDimension, os.str());
  }
  if (mean_in.size() != m2) throw Error(ErrorKind::InvalidDimension, "model: mean_in has the wrong length");
  if (!h_s.allFinite() || !c.allFinite() || !mean_in.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "model: non-finite entries");
  }
  if (max_abs(h_s - h_s.transpose()) > kSymmetryTol * std::max(1.0, max_abs(h_s))) {
    throw Error(ErrorKind::Symmetry, "model: H_S is not symmetric");
  }
  if (m2 > 0) static_cast<void>(CovarianceMatrix(sigma_in));
}

DriftDiffusion drift_diffusion(const DiffusiveModel& model) {
  model.validate();
  const Matrix omega = symplectic_form(model.modes());
  DriftDiffusion dd;
  if (model.env_modes() == 0) {
    dd.a = omega * model.h_s;
    dd.d = Matrix::Zero(model.h_s.rows(), model.h_s.rows());
    dd.drive = Vector::Zero(model.h_s.rows());
    return dd;
  }
  const Matrix omega_in = symplectic_form(model.env_modes());
  dd.a = omega * model.h_s + 0.5 * omega * model.c * omega_in * model.c.transpose();
  dd.d = symmetrized(omega * model.c * model.sigma_in * model.c.transpose() * omega.transpose());
  dd.drive = omega * model.c * model.mean_in;
  return dd;
}

MonitoredModel monitor(const DiffusiveModel& model, std::vector<GeneralDyneSetting> settings) {
  MonitoredModel mm;
  mm.dd = drift_diffusion(model);
  if (settings.size() != model.env_modes()) {
    throw Error(ErrorKind::InvalidArgument, "monitor: one measurement setting per environment mode required");
  }
  const Matrix root = sqrt_psd(measurement_inverse(model.sigma_in, settings));
  const Matrix omega = symplectic_form(model.modes());
  const Matrix omega_in = symplectic_form(model.env_modes());
  mm.b = model.c * omega_in * root;
  mm.e = omega * model.c * model.sigma_in * root;
  mm.base = model;
  mm.settings = std::move(settings);
  return mm;
}

MonitoredModel monitor(const DiffusiveModel& model, const GeneralDyneSetting& setting) {
  return monitor(model, std::vector<GeneralDyneSetting>{setting});
}

NormalizedEnvironment normalize_environment(const DiffusiveModel& model,
                                            std::span<const GeneralDyneSetting> settings) {
  model.validate();
  const std::size_t m = model.env_modes();
  if (settings.size() != m) {
    throw Error(ErrorKind::InvalidArgument, "normalize_environment: one setting per environment mode required");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto blk = model.sigma_in.block<2, 2>(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * j));
      if (blk.cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw Error(ErrorKind::UnsupportedDimension,
                    "normalize_environment: correlated environment modes are not supported");
      }
    }
  }

  std::vector<Matrix2> s_blocks;
  std::vector<Matrix2> nu_blocks;
  NormalizedEnvironment out;
  for (std::size_t j = 0; j < m; ++j) {
    const auto o = static_cast<Eigen::Index>(2 * j);
    const Matrix2 sj = model.sigma_in.block<2, 2>(o, o);
    const SingleModeNormalForm nf = single_mode_normal_form(CovarianceMatrix::from_computed(sj));
    // sigma_j = nu S S^T with S = R_phi diag(z, 1/z).
    const Matrix2 s = rotation(nf.phi) * squeezer(nf.z);
    s_blocks.push_back(s);
    nu_blocks.push_back(nf.nu * Matrix2::Identity());

    out.settings.push_back(transform_setting(settings[j], s.inverse()));
  }
  out.model = model;
  out.model.c = model.c * block_diagonal(s_blocks);
  out.model.sigma_in = block_diagonal(nu_blocks);
  out.model.mean_in = block_diagonal(s_blocks).inverse() * model.mean_in;
  return out;
}

bool is_hurwitz(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidDimension, "is_hurwitz: square matrix required");
  }
  Eigen::EigenSolver<Matrix> es(a, false);
  return (es.eigenvalues().real().array() < -kHurwitzTol).all();
}

GaussianState steady_state_unconditional(const DriftDiffusion& dd) {
  if (!is_hurwitz(dd.a)) {
    throw Error(ErrorKind::NoSteadyState, "drift matrix is not Hurwitz: no unconditional steady state");
  }
  const auto n = dd.a.rows();
  const Matrix id = Matrix::Identity(n, n);
  // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S), column-major.
  const Matrix op = kron(id, dd.a) + kron(dd.a, id);
  const Vector rhs = -Eigen::Map<const Vector>(dd.d.data(), n * n);
  const Vector vs = op.fullPivLu().solve(rhs);
  const Matrix s = symmetrized(Eigen::Map<const Matrix>(vs.data(), n, n));
  const double residual = max_abs(dd.a * s + s * dd.a.transpose() + dd.d);
  if (residual > kLyapunovTol * std::max(1.0, max_abs(dd.d))) {
    std::ostringstream os;
    os << "Lyapunov solve residual " << residual << " above tolerance";
    throw Error(ErrorKind::Numeric, os.str());
  }
  Vector mean = -dd.a.fullPivLu().solve(dd.drive);
  return GaussianState(std::move(mean), CovarianceMatrix::from_computed(s));
}

std::vector<CovarianceMatrix> evolve_conditional_cm(const MonitoredModel& mm, const CovarianceMatrix& sigma0,
                                                    std::span<const double> t_grid, double max_dt) {
  if (sigma0.matrix().rows() != mm.dd.a.rows()) {
    throw Error(ErrorKind::InvalidDimension, "initial CM does not match the model");
  }
  return integrate_cm(monitored_flow(mm), sigma0.matrix(), t_grid, max_dt);
}

UnconditionalPath evolve_unconditional(const DriftDiffusion& dd, const GaussianState& initial,
                                       std::span<const double> t_grid, double max_dt) {
  if (initial.covariance().rows() != dd.a.rows()) {
    throw Error(ErrorKind::InvalidDimension, "initial state does not match the model");
  }
  UnconditionalPath path;
  path.cms = integrate_cm(unmonitored_flow(dd), initial.covariance(), t_grid, max_dt);
  auto f = [&](const Vector& r) -> Vector { return dd.a * r + dd.drive; };
  Vector r = initial.mean();
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0.0) {
      const std::size_t steps = substeps(span, max_dt);
      const double h = span / static_cast<double>(steps);
      for (std::size_t k = 0; k < steps; ++k) {
        const Vector k1 = f(r);
        const Vector k2 = f(r + 0.5 * h * k1);
        const Vector k3 = f(r + 0.5 * h * k2);
        const Vector k4 = f(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = target;
    }
    path.means.push_back(r);
  }
  return path;
}

double riccati_residual(const MonitoredModel& mm, const Matrix& sigma) {
  const Matrix at = mm.dd.a + mm.e * mm.b.transpose();
  const Matrix dt = mm.dd.d - mm.e * mm.e.transpose();
  return max_abs(at * sigma + sigma * at.transpose() + dt - sigma * mm.b * mm.b.transpose() * sigma);
}

ConditionalSteadyState steady_state_conditional(const MonitoredModel& mm) {
  const GaussianState unc = steady_state_unconditional(mm.dd);
  const Flow flow = monitored_flow(mm);
  const double a_norm = spectral_norm(mm.dd.a);
  const double bb_norm = spectral_norm(mm.b * mm.b.transpose());
  const double eb_norm = spectral_norm(mm.e * mm.b.transpose());

  Matrix s = unc.covariance();
  double h = 0.0;
  std::size_t step = 0;
  for (;; ++step) {
    if (step % kRestepEvery == 0) {
      const double rate = a_norm + eb_norm + bb_norm * spectral_norm(s);
      h = 0.25 / std::max(rate, 1e-12);
      check_step(s, h, h * static_cast<double>(step));
    }
    const Matrix g = flow.e - s * flow.b;
    const Matrix drift = flow.a * s;
    const Matrix gg = g * g.transpose();
    const Matrix f = drift + drift.transpose() + flow.d - gg;
    // Below ~64 ulps of the largest term the derivative is rounding noise, and
    // once h f is under an ulp of sigma the step no longer moves it.
    const double eps = std::numeric_limits<double>::epsilon();
    const double scale = std::max({max_abs(drift), max_abs(flow.d), max_abs(gg)});
    const double floor = std::max({kSteadyTol, 64.0 * eps * scale, 4.0 * eps * max_abs(s) / h});
    if (max_abs(f) < floor) break;
    if (step >= kSteadyStepCap) {
      std::ostringstream os;
      os << "conditional steady state not reached after " << step << " steps (|dsigma/dt| = " << max_abs(f)
         << ", algebraic residual " << riccati_residual(mm, s) << ")";
      throw Error(ErrorKind::Convergence, os.str());
    }
    s = flow.rk4(s, h);
  }
  check_step(s, h, h * static_cast<double>(step));
  const double residual = riccati_residual(mm, s);
  if (residual > kAlgebraicTol) {
    std::ostringstream os;
    os << "conditional steady state has algebraic Riccati residual " << residual;
    throw Error(ErrorKind::Convergence, os.str());
  }
  return ConditionalSteadyState{CovarianceMatrix::from_computed(s), residual, step};
}

std::vector<double> daemonic_ergotropy_curve(const MonitoredModel& mm, const GaussianState& initial,
                                             std::span<const double> t_grid, double max_dt) {
  const UnconditionalPath unc = evolve_unconditional(mm.dd, initial, t_grid, max_dt);
  const std::vector<CovarianceMatrix> cond = evolve_conditional_cm(mm, initial.cm(), t_grid, max_dt);
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double e = 0.25 * unc.cms[k].matrix().trace() + 0.5 * unc.means[k].squaredNorm();
    out.push_back(e - 0.5 * symplectic_eigenvalues(cond[k]).sum());
  }
  return out;
}

double daemonic_ergotropy_t(const MonitoredModel& mm, const GaussianState& initial, double t, double max_dt) {
  const double grid[] = {t};
  return daemonic_ergotropy_curve(mm, initial, grid, max_dt).front();
}

double daemonic_ergotropy_ss(const MonitoredModel& mm) {
  const GaussianState unc = steady_state_unconditional(mm.dd);
  const ConditionalSteadyState cond = steady_state_conditional(mm);
  return energy(unc) - 0.5 * symplectic_eigenvalues(cond.cm).sum();
}

Vector TrajectoryBatch::mean(std::size_t traj, std::size_t t_index) const {
  const std::size_t at = (traj * times.size() + t_index) * dim;
  return Eigen::Map<const Vector>(means.data() + at, static_cast<Eigen::Index>(dim));
}

Vector TrajectoryBatch::record(std::size_t traj, std::size_t t_index) const {
  const std::size_t at = (traj * times.size() + t_index) * record_dim;
  return Eigen::Map<const Vector>(records.data() + at, static_cast<Eigen::Index>(record_dim));
}

TrajectoryBatch simulate_trajectories(const MonitoredModel& mm, const GaussianState& initial, double dt,
                                      double t_final, std::size_t n_traj, std::uint64_t master_seed,
                                      const TrajectoryOptions& options) {
  if (!(dt > 0.0) || !(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw Error(ErrorKind::InvalidArgument, "trajectories: need dt > 0 and finite T >= 0");
  }
  if (n_traj == 0) throw Error(ErrorKind::InvalidArgument, "trajectories: n_traj must be at least 1");
  if (initial.covariance().rows() != mm.dd.a.rows()) {
    throw Error(ErrorKind::InvalidDimension, "initial state does not match the model");
  }
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  const std::size_t stride = std::max<std::size_t>(1, options.save_stride);

  TrajectoryBatch batch;
  batch.n_traj = n_traj;
  batch.dim = static_cast<std::size_t>(mm.dd.a.rows());
  batch.record_dim = static_cast<std::size_t>(mm.b.cols());
  batch.seed = master_seed;

  // The conditional CM is outcome independent: one RK4 path and one gain per step.
  const Flow flow = monitored_flow(mm);
  std::vector<Matrix> gains;
  gains.reserve(steps);
  std::vector<std::size_t> saved;
  Matrix s = initial.covariance();
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k % stride == 0 || k == steps) {
      saved.push_back(k);
      batch.times.push_back(dt * static_cast<double>(k));
      batch.sigma_c.push_back(CovarianceMatrix::from_computed(s));
    }
    if (k == steps) break;
    gains.push_back(mm.e - s * mm.b);
    s = flow.rk4(s, dt);
    check_step(s, dt, dt * static_cast<double>(k + 1));
  }

  const std::size_t n_saved = saved.size();
  batch.means.assign(n_traj * n_saved * batch.dim, 0.0);
  batch.records.assign(n_traj * n_saved * batch.record_dim, 0.0);
  const Matrix bt = mm.b.transpose();
  const double noise_sd = std::sqrt(0.5 * dt);

  auto run = [&](std::size_t first, std::size_t last) {
    Vector r(batch.dim);
    Vector dw(batch.record_dim);
    Vector y(batch.record_dim);
    for (std::size_t traj = first; traj < last; ++traj) {
      RngStream rng = make_stream(master_seed, traj);
      std::normal_distribution<double> normal(0.0, noise_sd);
      r = initial.mean();
      y.setZero();
      std::size_t slot = 0;
      for (std::size_t k = 0; k <= steps; ++k) {
        if (slot < n_saved && saved[slot] == k) {
          const std::size_t at = traj * n_saved + slot;
          std::copy(r.data(), r.data() + batch.dim, batch.means.begin() + static_cast<std::ptrdiff_t>(at * batch.dim));
          std::copy(y.data(), y.data() + batch.record_dim,
                    batch.records.begin() + static_cast<std::ptrdiff_t>(at * batch.record_dim));
          y.setZero();
          ++slot;
        }
        if (k == steps) break;
        for (Eigen::Index i = 0; i < dw.size(); ++i) dw(i) = normal(rng);
        y.noalias() += -bt * r * dt + dw;
        r += (mm.dd.a * r + mm.dd.drive) * dt + gains[k] * dw;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_traj)));
  if (threads == 1) {
    run(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_traj + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t first = w * chunk;
      const std::size_t last = std::min(n_traj, first + chunk);
      if (first < last) pool.emplace_back(run, first, last);
    }
    for (auto& th : pool) th.join();
  }
  return batch;
}

Vector ensemble_mean(const TrajectoryBatch& batch, std::size_t t_index) {
  if (t_index >= batch.times.size()) throw Error(ErrorKind::InvalidArgument, "time index out of range");
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(batch.dim));
  for (std::size_t k = 0; k < batch.n_traj; ++k) acc += batch.mean(k, t_index);
  return acc / static_cast<double>(batch.n_traj);
}

Matrix excess_noise(const TrajectoryBatch& batch, std::size_t t_index) {
  if (batch.n_traj < 2) {
    throw Error(ErrorKind::InsufficientData, "excess noise needs at least two trajectories");
  }
  const Vector mu = ensemble_mean(batch, t_index);
  const auto n = static_cast<Eigen::Index>(batch.dim);
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < batch.n_traj; ++k) {
    const Vector dev = batch.mean(k, t_index) - mu;
    acc.noalias() += dev * dev.transpose();
  }
  return symmetrized(2.0 * acc / static_cast<double>(batch.n_traj - 1));
}

Vector ensemble_mean_standard_error(const TrajectoryBatch& batch, std::size_t t_index) {
  const Matrix sigma = excess_noise(batch, t_index);
  return (0.5 * sigma.diagonal() / static_cast<double>(batch.n_traj)).cwiseSqrt();
}

Matrix excess_noise_standard_error(const TrajectoryBatch& batch, std::size_t t_index) {
  const Matrix sigma = excess_noise(batch, t_index);
  const Vector mu = ensemble_mean(batch, t_index);
  const auto n = static_cast<Eigen::Index>(batch.dim);
  // Spread of the per-trajectory products 2 dev_i dev_j around their mean.
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < batch.n_traj; ++k) {
    const Vector dev = batch.mean(k, t_index) - mu;
    const Matrix prod = 2.0 * dev * dev.transpose() - sigma;
    acc += prod.cwiseProduct(prod);
  }
  const double m = static_cast<double>(batch.n_traj);
  return (acc / ((m - 1.0) * m)).cwiseSqrt();
}

}  // namespace gaussdaemon
