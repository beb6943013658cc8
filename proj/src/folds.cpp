#include "voxenc/folds.hpp"

#include <string>

#include "voxenc/errors.hpp"

namespace voxenc {

std::vector<Fold> contiguous_folds(Eigen::Index n, std::size_t k) {
  if (k < 2) throw InputError("need at least 2 folds, got " + std::to_string(k));
  if (static_cast<Eigen::Index>(k) > n)
    throw InputError(std::to_string(k) + " folds requested for only " + std::to_string(n) + " rows");
  std::vector<Fold> folds(k);
  const auto kk = static_cast<Eigen::Index>(k);
  for (Eigen::Index f = 0; f < kk; ++f) folds[static_cast<std::size_t>(f)] = {f * n / kk, (f + 1) * n / kk};
  return folds;
}

Eigen::MatrixXd rows_outside(const Eigen::MatrixXd& m, const Fold& held_out) {
  const auto tail = m.rows() - held_out.end;
  Eigen::MatrixXd out(held_out.begin + tail, m.cols());
  out.topRows(held_out.begin) = m.topRows(held_out.begin);
  out.bottomRows(tail) = m.bottomRows(tail);
  return out;
}

}  // namespace voxenc
