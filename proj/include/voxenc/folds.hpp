#pragma once

#include <Eigen/Core>

#include <vector>

namespace voxenc {

/// Half-open block of rows [begin, end) held out in one cross-validation fold.
struct Fold {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const noexcept { return end - begin; }
};

/// Splits n rows into k contiguous, non-shuffled blocks whose sizes differ by
/// at most one. Requires 2 <= k <= n.
std::vector<Fold> contiguous_folds(Eigen::Index n, std::size_t k);

/// Copies every row outside `held_out`, preserving order.
Eigen::MatrixXd rows_outside(const Eigen::MatrixXd& m, const Fold& held_out);

}  // namespace voxenc
