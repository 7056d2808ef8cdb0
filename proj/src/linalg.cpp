#include "bxc/linalg.hpp"

#include <algorithm>
#include <string>

#include "bxc/error.hpp"

namespace bxc::linalg {
namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int rank_from_singular_values(const Vector& sv, Eigen::Index rows, Eigen::Index cols,
                              double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold =
      static_cast<double>(std::max(rows, cols)) * tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++r;
  }
  return r;
}

void require_full_row_rank(const Matrix& h) {
  if (rank(h) < h.rows()) {
    throw Error(ErrorCode::kDegenerateChannel, "degenerate channel");
  }
}

}  // namespace

int rank(const Matrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), a.rows(), a.cols(), tol);
}

Matrix null_space_basis(const Matrix& h) {
  const auto n = h.rows();
  const auto m = h.cols();
  if (m <= n) throw Error(ErrorCode::kNoNullSpace, "no null space");
  const auto svd = full_svd(h);
  if (rank_from_singular_values(svd.singularValues(), n, m, kRankEpsilon) < n) {
    throw Error(ErrorCode::kDegenerateChannel, "degenerate channel");
  }
  return svd.matrixV().rightCols(m - n);
}

Matrix pseudo_inverse(const Matrix& h) {
  if (h.cols() < h.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pseudo_inverse needs at least as many columns as rows");
  }
  require_full_row_rank(h);
  const Matrix gram = h * h.transpose();
  return h.transpose() *
         gram.partialPivLu().solve(Matrix::Identity(h.rows(), h.rows()));
}

Matrix alignment_block(const Matrix& h, int k) {
  if (k < 0 || k > h.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "alignment width " + std::to_string(k) + " out of range [0, " +
                    std::to_string(h.rows()) + "]");
  }
  return pseudo_inverse(h).leftCols(k);
}

std::pair<Matrix, Matrix> joint_alignment(const Matrix& ha, const Matrix& hb, int k) {
  if (ha.rows() != hb.rows() || ha.cols() != hb.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint_alignment: shape mismatch");
  }
  const auto n = ha.rows();
  const auto m = ha.cols();
  if (k < 0 || k > 2 * m - n) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint alignment width " + std::to_string(k) + " exceeds 2M-N");
  }
  if (k == 0) return {Matrix(m, 0), Matrix(m, 0)};
  Matrix stacked(n, 2 * m);
  stacked << ha, -hb;
  const auto svd = full_svd(stacked);
  if (rank_from_singular_values(svd.singularValues(), n, 2 * m, kRankEpsilon) < n) {
    throw Error(ErrorCode::kDegenerateChannel, "degenerate channel");
  }
  const Matrix basis = svd.matrixV().rightCols(2 * m - n).leftCols(k);
  return {basis.topRows(m), basis.bottomRows(m)};
}

Vector solve_exact(const Matrix& a, const Vector& y, double tol) {
  if (a.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "solve_exact: row count mismatch");
  }
  if (a.cols() == 0) return Vector(0);
  if (rank(a) < a.cols()) throw Error(ErrorCode::kUnderdetermined, "underdetermined");
  Vector x = a.colPivHouseholderQr().solve(y);
  const double residual = (a * x - y).norm();
  if (residual > tol * y.norm()) {
    throw Error(ErrorCode::kInconsistentSystem, "inconsistent system");
  }
  return x;
}

Matrix identity_columns(int m, int offset, int count) {
  if (offset < 0 || count < 0 || offset + count > m) {
    throw Error(ErrorCode::kInvalidArgument, "identity slice out of range");
  }
  return Matrix::Identity(m, m).middleCols(offset, count);
}

}  // namespace bxc::linalg
