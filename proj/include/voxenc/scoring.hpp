#pragma once

#include <optional>
#include <span>
#include <vector>

#include "voxenc/bold.hpp"
#include "voxenc/config.hpp"
#include "voxenc/features.hpp"
#include "voxenc/scoremap.hpp"
#include "voxenc/stats.hpp"
#include "voxenc/stimulus.hpp"

namespace voxenc::scoring {

using stats::pearson;

/// Element-wise mean over subjects; subject_id becomes "group-mean".
BoldRun average_subjects(std::span<const BoldRun> runs);

/// Cross-validated encoding score: align features to frames, expand lags,
/// then fit ridge on contiguous outer training blocks and predict each
/// held-out block. One Pearson r per voxel is computed on the concatenated
/// out-of-fold predictions.
ScoreMap brain_score(const features::FeatureMatrix& f, const stimulus::Transcript& t,
                     const BoldRun& target, const RunConfig& cfg, std::size_t outer_folds);

/// brain_score with the pooled fold count.
inline ScoreMap brain_score(const features::FeatureMatrix& f, const stimulus::Transcript& t,
                            const BoldRun& group_mean, const RunConfig& cfg) {
  return brain_score(f, t, group_mean, cfg, cfg.outer_folds_pooled);
}

/// Out-of-fold predictions behind brain_score (frames x voxels). Each fold
/// contributes its weight term only, divided per voxel by the RMS of the
/// same term on its own training frames. Training-mean intercepts would
/// anti-correlate with the held-out block means, and the raw scale follows
/// the selected penalty, which depends on the other folds' targets.
Eigen::MatrixXd cross_validated_predictions(const Eigen::MatrixXd& design, const Eigen::MatrixXd& Y,
                                            const RunConfig& cfg, std::size_t outer_folds);

/// Split-half noise ceiling: subjects are shuffled into halves A and B
/// (|A| = floor(T/2)) `splits` times; each split contributes the per-voxel r
/// between the two half means, averaged over splits.
ScoreMap ceiling(std::span<const BoldRun> runs, std::size_t splits, std::uint64_t seed,
                 int workers = 0);

/// mem - base.
ScoreMap memory_score(const ScoreMap& mem, const ScoreMap& base);

/// (sft - base) / base, undefined where |base| < eps.
ScoreMap tuning_score(const ScoreMap& sft, const ScoreMap& base, double eps);

/// brain_score of each run separately with the per-subject fold count.
std::vector<ScoreMap> subject_scores(const features::FeatureMatrix& f,
                                     const stimulus::Transcript& t, std::span<const BoldRun> runs,
                                     const RunConfig& cfg);

/// Pooled brain score for each layer of one model. Layer ids must be unique.
std::vector<ScoreMap> layer_sweep(std::span<const features::FeatureMatrix> layers,
                                  const stimulus::Transcript& t, const BoldRun& target,
                                  const RunConfig& cfg);

}  // namespace voxenc::scoring
