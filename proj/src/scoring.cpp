#include "voxenc/scoring.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "voxenc/alignment.hpp"
#include "voxenc/errors.hpp"
#include "voxenc/kernels.hpp"
#include "voxenc/ridge.hpp"

namespace voxenc::scoring {

namespace {

void check_same_recording(std::span<const BoldRun> runs) {
  if (runs.empty()) throw InputError("no BOLD runs given");
  const auto& first = runs.front();
  first.validate();
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto& r = runs[i];
    r.validate();
    if (r.frames() != first.frames() || r.voxels() != first.voxels())
      throw InputError("run '" + r.subject_id + "' differs in shape from run '" + first.subject_id + "'");
    if (!(r.timeline == first.timeline))
      throw InputError("run '" + r.subject_id + "' differs in timeline from run '" + first.subject_id + "'");
    if (r.story_id != first.story_id)
      throw InputError("runs belong to different stories ('" + first.story_id + "' vs '" + r.story_id + "')");
  }
}

// Mean taken as ref + sum(x - ref) / n, so identical inputs average to
// exactly themselves.
Eigen::MatrixXd mean_of(std::span<const BoldRun> runs, std::span<const std::size_t> pick) {
  const auto& ref = runs[pick[0]].values;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ref.rows(), ref.cols());
  for (std::size_t idx : pick) acc += runs[idx].values - ref;
  return ref + acc / static_cast<double>(pick.size());
}

Eigen::VectorXd correlations(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const RunConfig& cfg) {
  return cfg.backend == ridge::Backend::serial_reference
             ? kernels::serial::column_correlations(a, b)
             : kernels::parallel::column_correlations(a, b, cfg.workers);
}

// Uniform integer in [0, n) from a 64-bit engine by rejection, independent
// of the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

void check_comparable(const ScoreMap& a, const ScoreMap& b) {
  if (a.voxels() != b.voxels())
    throw InputError("score maps differ in voxel count (" + std::to_string(a.voxels()) + " vs " +
                     std::to_string(b.voxels()) + ")");
  if (!a.story_id.empty() && !b.story_id.empty() && a.story_id != b.story_id)
    throw InputError("score maps come from different stories ('" + a.story_id + "' vs '" +
                     b.story_id + "')");
}

}  // namespace

BoldRun average_subjects(std::span<const BoldRun> runs) {
  check_same_recording(runs);
  std::vector<std::size_t> all(runs.size());
  std::iota(all.begin(), all.end(), 0);
  BoldRun out;
  out.subject_id = "group-mean";
  out.story_id = runs.front().story_id;
  out.timeline = runs.front().timeline;
  out.values = mean_of(runs, all);
  return out;
}

Eigen::MatrixXd cross_validated_predictions(const Eigen::MatrixXd& design, const Eigen::MatrixXd& Y,
                                            const RunConfig& cfg, std::size_t outer_folds) {
  if (design.rows() != Y.rows()) throw InputError("design and targets differ in frame count");
  const auto folds = contiguous_folds(design.rows(), outer_folds);
  const auto opts = cfg.ridge_options();
  Eigen::MatrixXd predictions(Y.rows(), Y.cols());
  for (const auto& fold : folds) {
    const auto train = rows_outside(design, fold);
    const auto fit = ridge::fit_ridge(train, rows_outside(Y, fold), opts);
    Eigen::MatrixXd fitted = ridge::predict(fit, train);
    fitted.rowwise() -= fit.intercepts.transpose();
    auto block = predictions.middleRows(fold.begin, fold.size());
    block = ridge::predict(fit, design.middleRows(fold.begin, fold.size()));
    block.rowwise() -= fit.intercepts.transpose();
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      const double rms = std::sqrt(fitted.col(j).squaredNorm() / static_cast<double>(fitted.rows()));
      if (rms > 0.0) block.col(j) /= rms;
    }
  }
  return predictions;
}

ScoreMap brain_score(const features::FeatureMatrix& f, const stimulus::Transcript& t,
                     const BoldRun& target, const RunConfig& cfg, std::size_t outer_folds) {
  cfg.validate();
  target.validate();
  features::validate_pair(f, t);
  const auto design = alignment::build_design(f, t, target.timeline, cfg.lags);
  const auto predictions = cross_validated_predictions(design.values, target.values, cfg, outer_folds);
  auto map = make_score_map(ScoreKind::brain, correlations(predictions, target.values, cfg));
  map.model_tag = f.model_tag;
  map.layer_id = f.layer_id;
  map.story_id = target.story_id;
  return map;
}

ScoreMap ceiling(std::span<const BoldRun> runs, std::size_t splits, std::uint64_t seed,
                 int workers) {
  if (runs.size() < 2) throw InputError("noise ceiling needs at least 2 subjects");
  if (splits == 0) throw InputError("noise ceiling needs at least 1 split");
  check_same_recording(runs);
  const auto voxels = runs.front().voxels();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(voxels);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(voxels);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(runs.size());
  for (std::size_t s = 0; s < splits; ++s) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[bounded(rng, i + 1)]);
    const auto half = order.size() / 2;
    const std::span<const std::size_t> a(order.data(), half);
    const std::span<const std::size_t> b(order.data() + half, order.size() - half);
    const Eigen::VectorXd r =
        kernels::parallel::column_correlations(mean_of(runs, a), mean_of(runs, b), workers);
    for (Eigen::Index j = 0; j < voxels; ++j) {
      if (std::isnan(r(j))) continue;
      sum(j) += r(j);
      ++count(j);
    }
  }
  Eigen::VectorXd out(voxels);
  for (Eigen::Index j = 0; j < voxels; ++j)
    out(j) = count(j) > 0 ? sum(j) / count(j) : std::numeric_limits<double>::quiet_NaN();
  auto map = make_score_map(ScoreKind::ceiling, out);
  map.story_id = runs.front().story_id;
  return map;
}

ScoreMap memory_score(const ScoreMap& mem, const ScoreMap& base) {
  check_comparable(mem, base);
  Eigen::VectorXd out(mem.voxels());
  for (Eigen::Index j = 0; j < mem.voxels(); ++j) {
    const auto m = mem.at(j);
    const auto b = base.at(j);
    out(j) = m && b ? *m - *b : std::numeric_limits<double>::quiet_NaN();
  }
  auto map = make_score_map(ScoreKind::memory, out);
  map.model_tag = mem.model_tag;
  map.layer_id = mem.layer_id;
  map.story_id = mem.story_id.empty() ? base.story_id : mem.story_id;
  return map;
}

ScoreMap tuning_score(const ScoreMap& sft, const ScoreMap& base, double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  check_comparable(sft, base);
  Eigen::VectorXd out(sft.voxels());
  for (Eigen::Index j = 0; j < sft.voxels(); ++j) {
    const auto s = sft.at(j);
    const auto b = base.at(j);
    out(j) = s && b && std::abs(*b) >= eps ? (*s - *b) / *b : std::numeric_limits<double>::quiet_NaN();
  }
  auto map = make_score_map(ScoreKind::tuning, out);
  map.model_tag = sft.model_tag;
  map.layer_id = sft.layer_id;
  map.story_id = sft.story_id.empty() ? base.story_id : sft.story_id;
  return map;
}

std::vector<ScoreMap> subject_scores(const features::FeatureMatrix& f,
                                     const stimulus::Transcript& t, std::span<const BoldRun> runs,
                                     const RunConfig& cfg) {
  check_same_recording(runs);
  std::vector<ScoreMap> maps;
  maps.reserve(runs.size());
  for (const auto& run : runs) maps.push_back(brain_score(f, t, run, cfg, cfg.outer_folds_subject));
  return maps;
}

std::vector<ScoreMap> layer_sweep(std::span<const features::FeatureMatrix> layers,
                                  const stimulus::Transcript& t, const BoldRun& target,
                                  const RunConfig& cfg) {
  if (layers.empty()) throw InputError("no feature layers given");
  std::set<std::int32_t> seen;
  for (const auto& f : layers)
    if (!seen.insert(f.layer_id).second)
      throw InputError("layer " + std::to_string(f.layer_id) + " given more than once");
  std::vector<ScoreMap> maps;
  maps.reserve(layers.size());
  for (const auto& f : layers) maps.push_back(brain_score(f, t, target, cfg));
  return maps;
}

}  // namespace voxenc::scoring
