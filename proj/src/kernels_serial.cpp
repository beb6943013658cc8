#include <Eigen/Dense>

#include <limits>

#include "voxenc/kernels.hpp"
#include "voxenc/stats.hpp"

namespace voxenc::kernels::serial {

Eigen::MatrixXd ridge_cv_errors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& /*gram*/, std::span<const double> penalties,
                                std::span<const Fold> folds) {
  const auto p = X.cols();
  const auto voxels = Y.cols();
  Eigen::MatrixXd errors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(penalties.size()), voxels);
  for (const auto& fold : folds) {
    const Eigen::MatrixXd Xt = rows_outside(X, fold);
    const Eigen::MatrixXd Yt = rows_outside(Y, fold);
    const auto Xv = X.middleRows(fold.begin, fold.size());
    const Eigen::MatrixXd rhs = Xt.transpose() * Yt;
    const Eigen::MatrixXd gram = Xt.transpose() * Xt;
    for (std::size_t l = 0; l < penalties.size(); ++l) {
      Eigen::MatrixXd system = gram;
      system.diagonal().array() += penalties[l];
      const Eigen::MatrixXd W = system.ldlt().solve(rhs);
      for (Eigen::Index j = 0; j < voxels; ++j) {
        double sse = 0.0;
        for (Eigen::Index i = 0; i < fold.size(); ++i) {
          double pred = 0.0;
          for (Eigen::Index k = 0; k < p; ++k) pred += Xv(i, k) * W(k, j);
          const double r = Y(fold.begin + i, j) - pred;
          sse += r * r;
        }
        errors(static_cast<Eigen::Index>(l), j) += sse / static_cast<double>(fold.size());
      }
    }
  }
  return errors / static_cast<double>(folds.size());
}

Eigen::MatrixXd ridge_refit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& gram, std::span<const double> voxel_penalty) {
  Eigen::MatrixXd W(X.cols(), Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += voxel_penalty[static_cast<std::size_t>(j)];
    W.col(j) = system.ldlt().solve(X.transpose() * Y.col(j));
  }
  return W;
}

Eigen::VectorXd column_correlations(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  check_correlation_shapes(A, B);
  Eigen::VectorXd r(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const auto v = stats::pearson({A.col(j).data(), static_cast<std::size_t>(A.rows())},
                                  {B.col(j).data(), static_cast<std::size_t>(B.rows())});
    r(j) = v ? *v : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace voxenc::kernels::serial
