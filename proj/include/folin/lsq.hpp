#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace folin {

struct OrderedLsqResult {
  Eigen::VectorXd solution;  // zero for dropped columns
  double residual_norm = 0.0;
  double condition = 1.0;    // of the kept, column-normalized submatrix
  std::vector<bool> kept;
};

/// Least squares M x ~ r restricted to a basic set of columns.
///
/// Columns are admitted in `preference` order; a column whose normalized
/// component orthogonal to the columns already admitted is at most
/// `dependence_tol` is dropped and its coefficient fixed to zero. Columns not
/// listed in `preference` are never used. The kept columns have full rank, so
/// the restricted solution is unique.
OrderedLsqResult solve_ordered_lsq(const Eigen::MatrixXd& m, const Eigen::VectorXd& r,
                                   std::span<const Eigen::Index> preference, double dependence_tol);

}  // namespace folin
