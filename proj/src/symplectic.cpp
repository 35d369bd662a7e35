#include "gaussdaemon/symplectic.hpp"

#include "gaussdaemon/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace gaussdaemon {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Symmetry: return "symmetry";
    case ErrorKind::Unphysical: return "unphysical-state";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Symplecticity: return "symplecticity";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::NoSteadyState: return "no-steady-state";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Instability: return "instability";
  }
  return "unknown";
}

Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "sqrt_psd: eigensolver failed");
  }
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix sub_block(const Matrix& m, std::span<const std::size_t> rows,
                 std::span<const std::size_t> cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

Vector sub_vector(const Vector& v, std::span<const std::size_t> idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

Matrix symplectic_form(std::size_t modes) {
  if (modes == 0) {
    throw Error(ErrorKind::InvalidDimension, "symplectic_form: mode count must be >= 1");
  }
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; j += 2) {
    omega(j, j + 1) = 1.0;
    omega(j + 1, j) = -1.0;
  }
  return omega;
}

double heisenberg_min_eigenvalue(const Matrix& sigma) {
  const Eigen::MatrixXcd h =
      sigma.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * symplectic_form(static_cast<std::size_t>(sigma.rows() / 2))
                                           .cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "heisenberg check: eigensolver failed");
  }
  return es.eigenvalues().minCoeff();
}

namespace {

void check_shape(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols() || m.rows() % 2 != 0) {
    std::ostringstream os;
    os << "covariance matrix must be a non-empty 2n x 2n matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorKind::InvalidDimension, os.str());
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::Numeric, "covariance matrix has non-finite entries");
  }
}

void check_physical(const Matrix& m) {
  const double lowest = heisenberg_min_eigenvalue(m);
  if (lowest < -kPsdTol) {
    std::ostringstream os;
    os << "covariance matrix violates sigma + i*Omega >= 0 (most negative eigenvalue "
       << lowest << ")";
    throw Error(ErrorKind::Unphysical, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::Unphysical, "covariance matrix is not strictly positive definite");
  }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix entries) : m_(std::move(entries)) {
  check_shape(m_);
  const double asym = max_abs(m_ - m_.transpose());
  if (asym > kSymmetryTol) {
    std::ostringstream os;
    os << "covariance matrix is not symmetric (max |s_ij - s_ji| = " << asym << ")";
    throw Error(ErrorKind::Symmetry, os.str());
  }
  m_ = symmetrized(m_);
  check_physical(m_);
}

CovarianceMatrix::CovarianceMatrix(Matrix entries, Trusted) : m_(std::move(entries)) {}

CovarianceMatrix CovarianceMatrix::from_computed(const Matrix& entries) {
  check_shape(entries);
  Matrix m = symmetrized(entries);
  check_physical(m);
  return CovarianceMatrix(std::move(m), Trusted{});
}

GaussianState::GaussianState(Vector mean, CovarianceMatrix cm)
    : mean_(std::move(mean)), cm_(std::move(cm)) {
  if (mean_.size() != cm_.matrix().rows()) {
    std::ostringstream os;
    os << "mean has length " << mean_.size() << " but covariance matrix is "
       << cm_.matrix().rows() << "x" << cm_.matrix().rows();
    throw Error(ErrorKind::InvalidDimension, os.str());
  }
  if (!mean_.allFinite()) {
    throw Error(ErrorKind::Numeric, "mean has non-finite entries");
  }
}

GaussianState GaussianState::vacuum(std::size_t modes) { return thermal(1.0, modes); }

GaussianState GaussianState::thermal(double nu, std::size_t modes) {
  if (modes == 0) throw Error(ErrorKind::InvalidDimension, "thermal: mode count must be >= 1");
  if (!(nu >= 1.0)) throw Error(ErrorKind::InvalidArgument, "thermal: nu must be >= 1");
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  return GaussianState(Vector::Zero(dim), CovarianceMatrix(nu * Matrix::Identity(dim, dim)));
}

double SymplecticSpectrum::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double SymplecticSpectrum::product() const {
  return std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
}

GaussianState validate_state(const Vector& mean, const Matrix& cm) {
  return GaussianState(mean, CovarianceMatrix(cm));
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cm) {
  const Matrix& sigma = cm.matrix();
  const std::size_t n = cm.modes();
  SymplecticSpectrum spectrum;
  spectrum.values.reserve(n);

  if (n == 1) {
    spectrum.values.push_back(std::sqrt(sigma.determinant()));
  } else {
    // -(Omega sigma)^2 is similar to the symmetric matrix
    // sigma^{1/2} Omega^T sigma Omega sigma^{1/2}; its eigenvalues are nu_j^2,
    // each appearing twice.
    const Matrix omega = symplectic_form(n);
    const Matrix root = sqrt_psd(sigma);
    const Matrix m = symmetrized(root * omega.transpose() * sigma * omega * root);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::Numeric, "symplectic_eigenvalues: eigensolver did not converge");
    }
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), std::greater<>());
    for (std::size_t j = 0; j < n; ++j) {
      const double sq = 0.5 * (ev[2 * j] + ev[2 * j + 1]);
      spectrum.values.push_back(std::sqrt(std::max(sq, 0.0)));
    }
  }

  for (double& nu : spectrum.values) {
    if (nu < 1.0 - kPsdTol) {
      std::ostringstream os;
      os << "symplectic eigenvalue " << nu << " below the vacuum level";
      throw Error(ErrorKind::Unphysical, os.str());
    }
    nu = std::max(nu, 1.0);
  }
  std::sort(spectrum.values.begin(), spectrum.values.end(), std::greater<>());
  return spectrum;
}

double energy(const GaussianState& state) {
  return 0.5 * state.mean().squaredNorm() + 0.25 * state.covariance().trace();
}

double purity(const GaussianState& state) {
  const double det = state.covariance().determinant();
  if (!(det > 0.0)) {
    throw Error(ErrorKind::Numeric, "purity: covariance determinant is not positive");
  }
  return 1.0 / std::sqrt(det);
}

Matrix2 rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Matrix2 r;
  r << c, s, -s, c;
  return r;
}

Matrix2 squeezer(double z) {
  if (!(z > 0.0)) throw Error(ErrorKind::InvalidArgument, "squeezer: z must be positive");
  Matrix2 out = Matrix2::Zero();
  out(0, 0) = z;
  out(1, 1) = 1.0 / z;
  return out;
}

bool is_symplectic(const Matrix& s, double tol) {
  if (s.rows() == 0 || s.rows() != s.cols() || s.rows() % 2 != 0) return false;
  const Matrix omega = symplectic_form(static_cast<std::size_t>(s.rows() / 2));
  return max_abs(s * omega * s.transpose() - omega) <= tol;
}

GaussianState apply_symplectic(const GaussianState& state, const Matrix& s) {
  if (s.rows() != state.covariance().rows() || s.cols() != s.rows()) {
    throw Error(ErrorKind::InvalidDimension, "apply_symplectic: dimension mismatch");
  }
  if (!is_symplectic(s)) {
    throw Error(ErrorKind::Symplecticity, "apply_symplectic: matrix is not symplectic");
  }
  return GaussianState(s * state.mean(),
                       CovarianceMatrix::from_computed(s * state.covariance() * s.transpose()));
}

GaussianState displace(const GaussianState& state, const Vector& shift) {
  if (shift.size() != state.mean().size()) {
    throw Error(ErrorKind::InvalidDimension, "displace: dimension mismatch");
  }
  return GaussianState(state.mean() + shift, state.cm());
}

std::vector<std::size_t> quadrature_indices(std::span<const std::size_t> modes) {
  std::vector<std::size_t> idx;
  idx.reserve(2 * modes.size());
  for (std::size_t m : modes) {
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  return idx;
}

GaussianState reduce(const GaussianState& state, std::span<const std::size_t> modes) {
  if (modes.empty()) throw Error(ErrorKind::InvalidArgument, "reduce: empty mode set");
  std::set<std::size_t> seen;
  for (std::size_t m : modes) {
    if (m >= state.modes()) throw Error(ErrorKind::InvalidArgument, "reduce: mode index out of range");
    if (!seen.insert(m).second) throw Error(ErrorKind::InvalidArgument, "reduce: duplicate mode index");
  }
  const auto idx = quadrature_indices(modes);
  return GaussianState(sub_vector(state.mean(), idx),
                       CovarianceMatrix::from_computed(sub_block(state.covariance(), idx, idx)));
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  Vector mean(a.mean().size() + b.mean().size());
  mean << a.mean(), b.mean();
  return GaussianState(std::move(mean),
                       CovarianceMatrix::from_computed(direct_sum(a.covariance(), b.covariance())));
}

}  // namespace gaussdaemon
