#pragma once

// Open Gaussian dynamics with the environment continuously monitored by
// general-dyne detection.
//
//   unconditional:  dr/dt = A r + d,            dsigma/dt = A sigma + sigma A^T + D
//   conditional:    dr_c  = (A r_c + d) dt + (E - sigma_c B) dw
//                   dsigma_c/dt = A sigma_c + sigma_c A^T + D - (E - sigma_c B)(E - sigma_c B)^T
//
// with A = Omega H_S + Omega C Omega C^T / 2, D = Omega C sigma_in C^T Omega^T,
// d = Omega C mean_in, B = C Omega M^{1/2}, E = Omega C sigma_in M^{1/2} and
// M = (sigma_in + sigma_m)^{-1} (rank-deficient limit for homodyne).

#include "gaussdaemon/general_dyne.hpp"
#include "gaussdaemon/symplectic.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gaussdaemon {

struct DiffusiveModel {
  Matrix h_s;       // 2n x 2n
  Matrix c;         // 2n x 2m
  Matrix sigma_in;  // 2m x 2m
  Vector mean_in;   // 2m

  std::size_t modes() const { return static_cast<std::size_t>(h_s.rows() / 2); }
  std::size_t env_modes() const { return static_cast<std::size_t>(sigma_in.rows() / 2); }

  void validate() const;
};

struct DriftDiffusion {
  Matrix a;
  Matrix d;
  Vector drive;
};

DriftDiffusion drift_diffusion(const DiffusiveModel& model);

struct MonitoredModel {
  DiffusiveModel base;
  std::vector<GeneralDyneSetting> settings;  // one per environment mode
  Matrix b;
  Matrix e;
  DriftDiffusion dd;
};

MonitoredModel monitor(const DiffusiveModel& model, std::vector<GeneralDyneSetting> settings);
MonitoredModel monitor(const DiffusiveModel& model, const GeneralDyneSetting& setting);

/// Same dynamics with an environment whose modes are in Williamson form
/// (sigma_in block diagonal nu_j I). The local symplectic S_j of each
/// environment mode is folded into C and into the measurement setting, so
/// A, D, B B^T, E B^T and E E^T are unchanged. Requires sigma_in to have no
/// correlations between environment modes.
struct NormalizedEnvironment {
  DiffusiveModel model;
  std::vector<GeneralDyneSetting> settings;
};

NormalizedEnvironment normalize_environment(const DiffusiveModel& model,
                                            std::span<const GeneralDyneSetting> settings);

inline constexpr double kHurwitzTol = 1e-12;

bool is_hurwitz(const Matrix& a);

/// Solves A sigma + sigma A^T + D = 0 and A r + d = 0.
GaussianState steady_state_unconditional(const DriftDiffusion& dd);

/// Fixed-step RK4 for the conditional CM. Between consecutive grid times the
/// interval is split into equal steps no longer than max_dt. Returns one CM per
/// grid time (the first is sigma0 when t_grid starts at 0).
std::vector<CovarianceMatrix> evolve_conditional_cm(const MonitoredModel& mm, const CovarianceMatrix& sigma0,
                                                    std::span<const double> t_grid, double max_dt);

/// Unconditional moments on a time grid (same stepping as above).
struct UnconditionalPath {
  std::vector<Vector> means;
  std::vector<CovarianceMatrix> cms;
};

UnconditionalPath evolve_unconditional(const DriftDiffusion& dd, const GaussianState& initial,
                                       std::span<const double> t_grid, double max_dt);

struct ConditionalSteadyState {
  CovarianceMatrix cm;
  /// max-abs residual of the algebraic Riccati equation.
  double residual = 0.0;
  std::size_t steps = 0;
};

/// Integrates the Riccati flow from the unconditional steady state to a fixed
/// point; throws Convergence if the step cap is reached or the algebraic
/// residual exceeds 1e-9.
ConditionalSteadyState steady_state_conditional(const MonitoredModel& mm);

/// Algebraic residual (A + E B^T) s + s (A + E B^T)^T + D - E E^T - s B B^T s.
double riccati_residual(const MonitoredModel& mm, const Matrix& sigma);

/// Daemonic ergotropy of the monitored system at each grid time.
std::vector<double> daemonic_ergotropy_curve(const MonitoredModel& mm, const GaussianState& initial,
                                             std::span<const double> t_grid, double max_dt);
double daemonic_ergotropy_t(const MonitoredModel& mm, const GaussianState& initial, double t,
                            double max_dt = 1e-3);

/// Steady-state daemonic ergotropy: unconditional energy minus the passive
/// energy of the conditional steady state.
double daemonic_ergotropy_ss(const MonitoredModel& mm);

struct TrajectoryOptions {
  std::size_t save_stride = 1;
  unsigned threads = 1;
};

/// Ensemble of conditional trajectories saved every `save_stride` steps.
/// Records hold the integrated dy over each save interval.
struct TrajectoryBatch {
  std::vector<double> times;
  std::vector<CovarianceMatrix> sigma_c;
  std::size_t n_traj = 0;
  std::size_t dim = 0;
  std::size_t record_dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> means;    // [traj][time][dim]
  std::vector<double> records;  // [traj][time][record_dim]

  Vector mean(std::size_t traj, std::size_t t_index) const;
  Vector record(std::size_t traj, std::size_t t_index) const;
};

TrajectoryBatch simulate_trajectories(const MonitoredModel& mm, const GaussianState& initial, double dt,
                                      double t_final, std::size_t n_traj, std::uint64_t master_seed,
                                      const TrajectoryOptions& options = {});

/// Ensemble mean of the conditional first moments.
Vector ensemble_mean(const TrajectoryBatch& batch, std::size_t t_index);

/// Sigma = 2 x sample covariance of the conditional means.
Matrix excess_noise(const TrajectoryBatch& batch, std::size_t t_index);

/// Monte Carlo standard errors of ensemble_mean and excess_noise entries.
Vector ensemble_mean_standard_error(const TrajectoryBatch& batch, std::size_t t_index);
Matrix excess_noise_standard_error(const TrajectoryBatch& batch, std::size_t t_index);

}  // namespace gaussdaemon
