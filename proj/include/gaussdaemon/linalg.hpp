#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace gaussdaemon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

/// Tolerances shared by every module.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kSymplecticTol = 1e-10;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Square root of a symmetric positive semidefinite matrix; eigenvalues below
/// zero (rounding) are clamped.
Matrix sqrt_psd(const Matrix& m);

/// Kronecker product a ⊗ b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Principal rows/columns selected by index.
Matrix sub_block(const Matrix& m, std::span<const std::size_t> rows,
                 std::span<const std::size_t> cols);
Vector sub_vector(const Vector& v, std::span<const std::size_t> idx);

}  // namespace gaussdaemon
