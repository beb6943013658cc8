#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "voxenc/folds.hpp"

namespace voxenc::ridge {

/// Strictly increasing positive penalties.
struct PenaltyGrid {
  std::vector<double> values;

  /// n values 10^lo .. 10^hi, evenly spaced in the exponent.
  static PenaltyGrid logspace(double lo_exponent, double hi_exponent, std::size_t n);
  /// 10 values, 1e-1 .. 1e8.
  static PenaltyGrid defaults() { return logspace(-1.0, 8.0, 10); }

  void validate() const;
  std::size_t size() const noexcept { return values.size(); }
};

enum class Backend { parallel, serial_reference };

struct RidgeOptions {
  PenaltyGrid grid = PenaltyGrid::defaults();
  std::size_t inner_folds = 5;
  /// z-score design columns and center targets with training statistics.
  /// Disabled only for closed-form checks on raw data.
  bool standardize = true;
  Backend backend = Backend::parallel;
  int workers = 0;
};

struct RidgeFit {
  Eigen::MatrixXd weights;  // features x voxels, applied to standardized columns
  Eigen::VectorXd penalties;  // chosen per voxel
  std::vector<std::size_t> penalty_index;
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_stds;
  std::vector<bool> retained;  // false for constant columns (zero weight)
  Eigen::VectorXd intercepts;
  /// Mean inner-fold validation MSE, grid x voxels. Empty when the grid has a
  /// single value and no selection was needed.
  Eigen::MatrixXd cv_errors;

  Eigen::Index features() const noexcept { return weights.rows(); }
  Eigen::Index voxels() const noexcept { return weights.cols(); }
};

/// Per-voxel ridge regression with the penalty chosen by contiguous-block
/// inner cross-validation, then refit on all rows at the chosen penalty.
RidgeFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const RidgeOptions& opts);

Eigen::MatrixXd predict(const RidgeFit& fit, const Eigen::MatrixXd& X);

/// Solves (X'X + lambda I) w = X'y with a dense LU. For small checks only
/// (at most 64 columns); throws on a singular system.
Eigen::VectorXd closed_form_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   double lambda);

}  // namespace voxenc::ridge
