#pragma once

// Dense kernels used to assemble and check precoders. Everything here works
// on small real matrices (a few dozen rows at most) and favours SVD-based
// answers over speed.

#include <utility>

#include <Eigen/Dense>

namespace bxc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Relative factor applied in rank decisions: a singular value counts when it
/// exceeds max(rows, cols) * kRankEpsilon * sigma_max.
inline constexpr double kRankEpsilon = 1e-12;

/// Default relative residual accepted by solve_exact.
inline constexpr double kSolveTolerance = 1e-6;

int rank(const Matrix& a, double tol = kRankEpsilon);

/// Orthonormal basis (M x (M-N)) of the null space of a full-row-rank N x M
/// matrix with M > N. Columns follow the SVD ordering of right singular vectors.
Matrix null_space_basis(const Matrix& h);

/// Right inverse H^T (H H^T)^{-1} of a full-row-rank N x M matrix, M >= N.
Matrix pseudo_inverse(const Matrix& h);

/// Leading k columns of pseudo_inverse(h); H * G is the first k columns of I_N.
Matrix alignment_block(const Matrix& h, int k);

/// For tall or square channels (M <= N) there is no right inverse to align
/// with; instead return (G_a, G_b), each M x k, spanning part of the null space
/// of [H_a, -H_b] so that H_a G_a = H_b G_b. Requires k <= 2M - N.
std::pair<Matrix, Matrix> joint_alignment(const Matrix& ha, const Matrix& hb, int k);

/// Least-squares solve of a consistent, full-column-rank system.
Vector solve_exact(const Matrix& a, const Vector& y, double tol = kSolveTolerance);

/// Leading `count` columns of I_m starting at column `offset`.
Matrix identity_columns(int m, int offset, int count);

}  // namespace linalg
}  // namespace bxc
