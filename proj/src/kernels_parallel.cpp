#include <Eigen/Dense>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "voxenc/errors.hpp"
#include "voxenc/kernels.hpp"
#include "voxenc/stats.hpp"

namespace voxenc::kernels {

int resolve_workers(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

void check_correlation_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw InputError("correlation inputs differ in shape");
  if (A.rows() < 2) throw InputError("correlation needs at least 2 rows");
}

namespace parallel {

namespace {

Eigen::Index chunk_count(Eigen::Index voxels) { return (voxels + kVoxelChunk - 1) / kVoxelChunk; }

struct Eig {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;  // clamped at zero
};

Eig decompose(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  return {es.eigenvectors(), es.eigenvalues().cwiseMax(0.0)};
}

// For one fold, maps the training cross-products X_train' y to validation
// predictions for every penalty at once: rows [l*nv, (l+1)*nv) hold
// X_val V diag(1/(eig + penalty_l)) V'.
struct PreparedFold {
  Fold rows;
  Eigen::MatrixXd predictor;
};

PreparedFold prepare(const Eigen::MatrixXd& X, const Eigen::MatrixXd& gram,
                     std::span<const double> penalties, const Fold& fold) {
  const auto nv = fold.size();
  const auto p = X.cols();
  const auto Xv = X.middleRows(fold.begin, nv);
  Eigen::MatrixXd train_gram = gram;
  train_gram.noalias() -= Xv.transpose() * Xv;
  const auto eig = decompose(train_gram);
  const Eigen::MatrixXd Z = Xv * eig.vectors;

  PreparedFold out{fold, Eigen::MatrixXd(static_cast<Eigen::Index>(penalties.size()) * nv, p)};
  for (std::size_t l = 0; l < penalties.size(); ++l) {
    const Eigen::VectorXd shrink = (eig.values.array() + penalties[l]).inverse().matrix();
    out.predictor.middleRows(static_cast<Eigen::Index>(l) * nv, nv).noalias() =
        (Z * shrink.asDiagonal()) * eig.vectors.transpose();
  }
  return out;
}

}  // namespace

Eigen::MatrixXd ridge_cv_errors(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& gram, std::span<const double> penalties,
                                std::span<const Fold> folds, int workers) {
  const auto L = static_cast<Eigen::Index>(penalties.size());
  const auto voxels = Y.cols();
  std::vector<PreparedFold> prepared(folds.size());
  const auto nfolds = static_cast<std::ptrdiff_t>(folds.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (std::ptrdiff_t f = 0; f < nfolds; ++f) prepared[f] = prepare(X, gram, penalties, folds[f]);

  Eigen::MatrixXd errors = Eigen::MatrixXd::Zero(L, voxels);
  const auto chunks = chunk_count(voxels);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto j0 = c * kVoxelChunk;
    const auto w = std::min(kVoxelChunk, voxels - j0);
    const auto Yc = Y.middleCols(j0, w);
    const Eigen::MatrixXd cross = X.transpose() * Yc;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(L, w);
    for (const auto& pf : prepared) {
      const auto nv = pf.rows.size();
      const auto Yv = Yc.middleRows(pf.rows.begin, nv);
      Eigen::MatrixXd train_cross = cross;
      train_cross.noalias() -= X.middleRows(pf.rows.begin, nv).transpose() * Yv;
      const Eigen::MatrixXd pred = pf.predictor * train_cross;
      for (Eigen::Index l = 0; l < L; ++l)
        acc.row(l) += (Yv - pred.middleRows(l * nv, nv)).colwise().squaredNorm() /
                      static_cast<double>(nv);
    }
    errors.middleCols(j0, w) = acc / static_cast<double>(prepared.size());
  }
  return errors;
}

Eigen::MatrixXd ridge_refit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& gram, std::span<const double> voxel_penalty,
                            int workers) {
  const auto eig = decompose(gram);
  const auto voxels = Y.cols();
  Eigen::MatrixXd W(X.cols(), voxels);
  const auto chunks = chunk_count(voxels);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const auto j0 = c * kVoxelChunk;
    const auto w = std::min(kVoxelChunk, voxels - j0);
    Eigen::MatrixXd coef = eig.vectors.transpose() * (X.transpose() * Y.middleCols(j0, w));
    for (Eigen::Index j = 0; j < w; ++j)
      coef.col(j).array() /= eig.values.array() + voxel_penalty[static_cast<std::size_t>(j0 + j)];
    W.middleCols(j0, w).noalias() = eig.vectors * coef;
  }
  return W;
}

Eigen::VectorXd column_correlations(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                    int workers) {
  check_correlation_shapes(A, B);
  const auto cols = A.cols();
  Eigen::VectorXd r(cols);
#pragma omp parallel for schedule(static) num_threads(resolve_workers(workers))
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto v = stats::pearson({A.col(j).data(), static_cast<std::size_t>(A.rows())},
                                  {B.col(j).data(), static_cast<std::size_t>(B.rows())});
    r(j) = v ? *v : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace parallel
}  // namespace voxenc::kernels
