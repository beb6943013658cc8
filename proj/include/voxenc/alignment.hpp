#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "voxenc/features.hpp"
#include "voxenc/stimulus.hpp"

namespace voxenc::alignment {

/// Acquisition times of the fMRI frames: frame k is sampled at t0 + k * tr
/// seconds relative to stimulus onset.
struct FrameTimeline {
  std::size_t frames = 0;
  double tr = 0.0;
  double t0 = 0.0;

  double frame_time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * tr; }
  void validate() const;

  bool operator==(const FrameTimeline&) const = default;
};

/// Lagged design matrix: row i is [x_i | x_{i-1} | ... | x_{i-k+1}].
struct DesignMatrix {
  Eigen::MatrixXd values;  // frames x (lags * dims)
  std::size_t lags = 1;
};

/// Nearest frame for each word onset. Ties go to the earlier frame; onsets
/// outside the scan window clamp to the first/last frame.
std::vector<std::size_t> assign_words_to_frames(std::span<const double> onsets,
                                                const FrameTimeline& tl);

/// Mean of the feature rows assigned to each frame; frames without words
/// get a zero row.
Eigen::MatrixXd pool_by_frame(const features::FeatureMatrix& f,
                              std::span<const std::size_t> assignment,
                              const FrameTimeline& tl);

/// FIR lag expansion. Lags reaching before the first frame are zero blocks.
DesignMatrix fir_expand(const Eigen::MatrixXd& pooled, std::size_t lags);

/// assign -> pool -> fir_expand for a validated feature/transcript pair.
DesignMatrix build_design(const features::FeatureMatrix& f, const stimulus::Transcript& t,
                          const FrameTimeline& tl, std::size_t lags);

}  // namespace voxenc::alignment
