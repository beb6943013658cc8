#include "voxenc/ridge.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "voxenc/errors.hpp"
#include "voxenc/kernels.hpp"

namespace voxenc::ridge {

PenaltyGrid PenaltyGrid::logspace(double lo_exponent, double hi_exponent, std::size_t n) {
  if (n == 0) throw InputError("penalty grid needs at least one value");
  PenaltyGrid g;
  g.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = n == 1 ? lo_exponent
                            : lo_exponent + (hi_exponent - lo_exponent) * static_cast<double>(i) /
                                                static_cast<double>(n - 1);
    g.values.push_back(std::pow(10.0, e));
  }
  g.validate();
  return g;
}

void PenaltyGrid::validate() const {
  if (values.empty()) throw InputError("penalty grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InputError("penalty grid values must be positive and finite");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw InputError("penalty grid must be strictly increasing");
  }
}

namespace {

struct Prepared {
  Eigen::MatrixXd X;  // retained columns only
  Eigen::MatrixXd Y;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  std::vector<bool> retained;
  Eigen::VectorXd intercepts;
};

Prepared prepare(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool standardize) {
  const auto n = X.rows();
  const auto p = X.cols();
  Prepared out;
  out.retained.assign(static_cast<std::size_t>(p), true);
  if (!standardize) {
    out.X = X;
    out.Y = Y;
    out.means = Eigen::VectorXd::Zero(p);
    out.stds = Eigen::VectorXd::Ones(p);
    out.intercepts = Eigen::VectorXd::Zero(Y.cols());
    return out;
  }

  out.means = X.colwise().mean().transpose();
  out.stds.resize(p);
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt((X.col(j).array() - out.means(j)).square().sum() / static_cast<double>(n));
    const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(out.means(j))));
    out.retained[static_cast<std::size_t>(j)] = !constant;
    out.stds(j) = constant ? 0.0 : sd;
    kept += constant ? 0 : 1;
  }
  if (kept == 0) throw InputError("every design column is constant on the training rows");

  out.X.resize(n, kept);
  for (Eigen::Index j = 0, k = 0; j < p; ++j) {
    if (!out.retained[static_cast<std::size_t>(j)]) continue;
    out.X.col(k++) = (X.col(j).array() - out.means(j)) / out.stds(j);
  }
  out.intercepts = Y.colwise().mean().transpose();
  out.Y = Y.rowwise() - out.intercepts.transpose();
  return out;
}

}  // namespace

RidgeFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const RidgeOptions& opts) {
  opts.grid.validate();
  if (X.rows() != Y.rows())
    throw InputError("design has " + std::to_string(X.rows()) + " rows but targets have " +
                     std::to_string(Y.rows()));
  if (X.cols() == 0 || Y.cols() == 0) throw InputError("empty design or target matrix");
  if (opts.inner_folds < 2) throw InputError("inner_folds must be at least 2");
  if (opts.grid.size() > 1 && X.rows() < static_cast<Eigen::Index>(opts.inner_folds))
    throw InputError(std::to_string(X.rows()) + " training frames is fewer than inner_folds = " +
                     std::to_string(opts.inner_folds));
  if (!X.allFinite() || !Y.allFinite()) throw InputError("non-finite values in ridge inputs");

  auto data = prepare(X, Y, opts.standardize);
  const Eigen::MatrixXd gram = data.X.transpose() * data.X;
  const auto voxels = Y.cols();
  const auto& grid = opts.grid.values;
  const bool serial = opts.backend == Backend::serial_reference;

  RidgeFit fit;
  fit.penalty_index.assign(static_cast<std::size_t>(voxels), 0);
  if (grid.size() > 1) {
    const auto folds = contiguous_folds(data.X.rows(), opts.inner_folds);
    fit.cv_errors = serial ? kernels::serial::ridge_cv_errors(data.X, data.Y, gram, grid, folds)
                           : kernels::parallel::ridge_cv_errors(data.X, data.Y, gram, grid, folds,
                                                                opts.workers);
    for (Eigen::Index j = 0; j < voxels; ++j) {
      Eigen::Index best = 0;
      for (Eigen::Index l = 1; l < fit.cv_errors.rows(); ++l)
        if (fit.cv_errors(l, j) < fit.cv_errors(best, j)) best = l;
      fit.penalty_index[static_cast<std::size_t>(j)] = static_cast<std::size_t>(best);
    }
  }
  std::vector<double> chosen(static_cast<std::size_t>(voxels));
  fit.penalties.resize(voxels);
  for (Eigen::Index j = 0; j < voxels; ++j) {
    chosen[static_cast<std::size_t>(j)] = grid[fit.penalty_index[static_cast<std::size_t>(j)]];
    fit.penalties(j) = chosen[static_cast<std::size_t>(j)];
  }

  const Eigen::MatrixXd reduced =
      serial ? kernels::serial::ridge_refit(data.X, data.Y, gram, chosen)
             : kernels::parallel::ridge_refit(data.X, data.Y, gram, chosen, opts.workers);

  fit.weights = Eigen::MatrixXd::Zero(X.cols(), voxels);
  for (Eigen::Index j = 0, k = 0; j < X.cols(); ++j)
    if (data.retained[static_cast<std::size_t>(j)]) fit.weights.row(j) = reduced.row(k++);
  fit.column_means = std::move(data.means);
  fit.column_stds = std::move(data.stds);
  fit.retained = std::move(data.retained);
  fit.intercepts = std::move(data.intercepts);
  return fit;
}

Eigen::MatrixXd predict(const RidgeFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() != fit.features())
    throw InputError("design width " + std::to_string(X.cols()) + " does not match fit width " +
                     std::to_string(fit.features()));
  Eigen::MatrixXd Z(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (fit.retained[static_cast<std::size_t>(j)])
      Z.col(j) = (X.col(j).array() - fit.column_means(j)) / fit.column_stds(j);
    else
      Z.col(j).setZero();
  }
  Eigen::MatrixXd out = Z * fit.weights;
  out.rowwise() += fit.intercepts.transpose();
  return out;
}

Eigen::VectorXd closed_form_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   double lambda) {
  if (X.cols() > 64) throw InputError("closed_form_oracle is limited to 64 columns");
  if (X.rows() != y.size()) throw InputError("closed_form_oracle: row mismatch");
  Eigen::MatrixXd system = X.transpose() * X;
  system.diagonal().array() += lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw InputError("closed_form_oracle: singular system");
  return lu.solve(X.transpose() * y);
}

}  // namespace voxenc::ridge
