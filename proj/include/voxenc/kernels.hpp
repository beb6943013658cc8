#pragma once

#include <Eigen/Core>

#include <span>

#include "voxenc/folds.hpp"

// Voxel-parallel compute kernels. Every kernel comes in two flavours:
//
//   parallel::  OpenMP over fixed-width voxel chunks. The chunk width does
//               not depend on the worker count, and each chunk runs the same
//               single-threaded Eigen code, so results are bit-identical for
//               any number of workers.
//   serial::    straightforward reference used by the tests and the bench.
//               It solves each penalty directly instead of reusing one
//               eigendecomposition per fold.
//
// All ridge kernels take an already standardized design X (rows x features),
// centered targets Y (rows x voxels) and the Gram matrix X'X.

namespace voxenc::kernels {

inline constexpr Eigen::Index kVoxelChunk = 256;

/// Number of OpenMP workers to use for `requested` (0 = runtime default).
int resolve_workers(int requested);

/// Throws InputError unless A and B have equal shapes with at least 2 rows.
void check_correlation_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

namespace parallel {

/// Mean (over folds) validation MSE of ridge fits, one row per penalty and
/// one column per voxel. Each fold is fitted without intercept on the rows
/// outside it.
Eigen::MatrixXd ridge_cv_errors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& gram, std::span<const double> penalties,
                                std::span<const Fold> folds, int workers);

/// Ridge weights on all rows with a per-voxel penalty.
Eigen::MatrixXd ridge_refit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& gram, std::span<const double> voxel_penalty,
                            int workers);

/// Pearson r per column pair; NaN where a column has zero variance.
Eigen::VectorXd column_correlations(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                    int workers);

}  // namespace parallel

namespace serial {

Eigen::MatrixXd ridge_cv_errors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& gram, std::span<const double> penalties,
                                std::span<const Fold> folds);

Eigen::MatrixXd ridge_refit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& gram, std::span<const double> voxel_penalty);

Eigen::VectorXd column_correlations(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace serial

}  // namespace voxenc::kernels
