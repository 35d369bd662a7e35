#pragma once

// Phase-space description of n-mode Gaussian states.
//
// Conventions used throughout the library:
//   * quadratures are ordered (x_1, p_1, ..., x_n, p_n);
//   * the covariance matrix is the anticommutator form
//       sigma = Tr[{r - mean, (r - mean)^T} rho],
//     so the vacuum has sigma = identity and Heisenberg reads sigma + i*Omega >= 0;
//   * energies are measured with the free Hamiltonian H0 = 1/2 sum (x^2 + p^2),
//     giving E = |mean|^2 / 2 + tr(sigma) / 4 (vacuum energy 1/2).

#include "gaussdaemon/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gaussdaemon {

class CovarianceMatrix {
 public:
  /// Validates a user-supplied matrix: square, even dimension, symmetric within
  /// kSymmetryTol, strictly positive and sigma + i*Omega >= -kPsdTol.
  explicit CovarianceMatrix(Matrix entries);

  /// For matrices produced by the library itself (conditioning, integrators):
  /// rounding asymmetry is removed before the physicality check.
  static CovarianceMatrix from_computed(const Matrix& entries);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(m_.rows() / 2); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  CovarianceMatrix(Matrix entries, Trusted);
  Matrix m_;
};

class GaussianState {
 public:
  GaussianState(Vector mean, CovarianceMatrix cm);

  static GaussianState vacuum(std::size_t modes = 1);
  static GaussianState thermal(double nu, std::size_t modes = 1);

  const Vector& mean() const noexcept { return mean_; }
  const CovarianceMatrix& cm() const noexcept { return cm_; }
  const Matrix& covariance() const noexcept { return cm_.matrix(); }
  std::size_t modes() const noexcept { return cm_.modes(); }

 private:
  Vector mean_;
  CovarianceMatrix cm_;
};

/// Symplectic eigenvalues, sorted descending.
struct SymplecticSpectrum {
  std::vector<double> values;

  double sum() const;
  double product() const;
};

/// Direct sum of n copies of [[0, 1], [-1, 0]].
Matrix symplectic_form(std::size_t modes);

/// Smallest eigenvalue of the Hermitian matrix sigma + i*Omega.
double heisenberg_min_eigenvalue(const Matrix& sigma);

GaussianState validate_state(const Vector& mean, const Matrix& cm);

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cm);

double energy(const GaussianState& state);
double purity(const GaussianState& state);

/// R_phi = [[cos, sin], [-sin, cos]].
Matrix2 rotation(double phi);
/// diag(z, 1/z), z > 0.
Matrix2 squeezer(double z);

bool is_symplectic(const Matrix& s, double tol = kSymplecticTol);

/// mean -> S mean, sigma -> S sigma S^T. Throws on non-symplectic S.
GaussianState apply_symplectic(const GaussianState& state, const Matrix& s);
GaussianState displace(const GaussianState& state, const Vector& shift);

/// Marginal on the listed modes (in the listed order).
GaussianState reduce(const GaussianState& state, std::span<const std::size_t> modes);

/// Tensor product at the phase-space level.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

Matrix direct_sum(const Matrix& a, const Matrix& b);

/// Quadrature indices (2j, 2j+1) of each listed mode.
std::vector<std::size_t> quadrature_indices(std::span<const std::size_t> modes);

}  // namespace gaussdaemon
