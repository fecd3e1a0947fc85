#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "narkoop/errors.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Relative singular-value floor: directions with sigma <= floor * sigma_max
/// are treated as null and never inverted, whatever rank was requested.
inline constexpr double kSingularValueFloor = 1e-12;

struct SvdFactors {
  Matrix left_vectors;     // U, thin
  Vector singular_values;  // non-increasing, non-negative
  Matrix right_vectors;    // V, thin
};

/// Thin SVD A = U S V^T with singular values sorted non-increasing.
inline SvdFactors svd(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ContractError("svd: matrix must have at least one row and column");
  }
  if (!a.allFinite()) {
    throw ContractError("svd: input contains non-finite entries");
  }
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericalError("svd: factorization did not converge");
  }
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Solves min_K ||future - K past||_F through the rank-truncated
/// pseudoinverse of `past`, sharing one factorization across truncation
/// ranks. `past` is q x m, `future` is r x m, the operator is r x q.
class TruncatedSolver {
 public:
  TruncatedSolver(const Matrix& past, const Matrix& future) {
    if (past.cols() != future.cols()) {
      throw ContractError("truncated solve: past and future must share column count (got " +
                          std::to_string(past.cols()) + " vs " + std::to_string(future.cols()) + ")");
    }
    if (past.cols() < 1) {
      throw ContractError("truncated solve: snapshot matrices need at least one column");
    }
    if (!future.allFinite()) {
      throw ContractError("truncated solve: future contains non-finite entries");
    }
    factors_ = svd(past);
    const double sigma_max = factors_.singular_values.size() > 0 ? factors_.singular_values(0) : 0.0;
    if (sigma_max <= 0.0) {
      throw DegenerateDataError("truncated solve: past snapshot matrix is identically zero");
    }
    const double floor = kSingularValueFloor * sigma_max;
    effective_rank_ = 0;
    for (Eigen::Index i = 0; i < factors_.singular_values.size(); ++i) {
      if (factors_.singular_values(i) > floor) ++effective_rank_;
    }
    future_sq_norm_ = future.squaredNorm();
    projected_ = future * factors_.right_vectors;  // r x k
    projected_col_sq_ = projected_.colwise().squaredNorm();
  }

  /// min(q, m): the largest admissible requested rank.
  int max_rank() const { return static_cast<int>(factors_.singular_values.size()); }

  /// Number of singular values above the relative floor.
  int effective_rank() const { return effective_rank_; }

  /// Rank actually used for a request (clipped to the effective rank).
  int used_rank(int rank) const {
    check_rank(rank);
    return std::min(rank, effective_rank_);
  }

  /// K = future V_r S_r^{-1} U_r^T with r = used_rank(rank).
  Matrix operator_at(int rank) const {
    const int r = used_rank(rank);
    return projected_.leftCols(r) *
           factors_.singular_values.head(r).cwiseInverse().asDiagonal() *
           factors_.left_vectors.leftCols(r).transpose();
  }

  /// ||future - K_r past||_F, via the identity K_r past = future V_r V_r^T.
  double residual_at(int rank) const {
    const int r = used_rank(rank);
    const double res_sq = future_sq_norm_ - projected_col_sq_.head(r).sum();
    return std::sqrt(std::max(res_sq, 0.0));
  }

  double future_norm() const { return std::sqrt(future_sq_norm_); }

  const SvdFactors& factors() const { return factors_; }

 private:
  void check_rank(int rank) const {
    if (rank < 1 || rank > max_rank()) {
      throw ContractError("truncated solve: rank " + std::to_string(rank) +
                          " out of range [1, " + std::to_string(max_rank()) + "]");
    }
  }

  SvdFactors factors_;
  Matrix projected_;        // future * V
  Vector projected_col_sq_;
  double future_sq_norm_ = 0.0;
  int effective_rank_ = 0;
};

/// One-shot truncated pseudoinverse least squares: K = future V~ S~^{-1} U~^T
/// over the top `rank` singular triplets of `past` (clipped to the singular
/// value floor). Minimizes ||future - K past||_F among rank-limited solutions.
inline Matrix truncated_pinv_solve(const Matrix& past, const Matrix& future, int rank) {
  return TruncatedSolver(past, future).operator_at(rank);
}

}  // namespace narkoop
