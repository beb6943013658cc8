#include "voxenc/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxenc/errors.hpp"

namespace voxenc::alignment {

void FrameTimeline::validate() const {
  if (frames == 0) throw InputError("timeline has no frames");
  if (!(tr > 0.0) || !std::isfinite(tr)) throw InputError("timeline TR must be positive and finite");
  if (!std::isfinite(t0)) throw InputError("timeline t0 must be finite");
}

std::vector<std::size_t> assign_words_to_frames(std::span<const double> onsets,
                                                const FrameTimeline& tl) {
  tl.validate();
  const auto last = static_cast<std::ptrdiff_t>(tl.frames) - 1;
  std::vector<std::size_t> out;
  out.reserve(onsets.size());
  for (double onset : onsets) {
    // floor() of the fractional position can be off by one in floating point,
    // so compare the exact frame times of the neighbouring candidates.
    const double pos = std::floor((onset - tl.t0) / tl.tr);
    const auto guess = static_cast<std::ptrdiff_t>(std::clamp(pos, -1.0, static_cast<double>(last)));
    std::size_t best = 0;
    double best_dist = INFINITY;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, guess - 1);
         k <= std::min(last, guess + 2); ++k) {
      const double dist = std::abs(tl.frame_time(static_cast<std::size_t>(k)) - onset);
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<std::size_t>(k);
      }
    }
    out.push_back(best);
  }
  return out;
}

Eigen::MatrixXd pool_by_frame(const features::FeatureMatrix& f,
                              std::span<const std::size_t> assignment, const FrameTimeline& tl) {
  if (assignment.size() != static_cast<std::size_t>(f.rows()))
    throw InputError("assignment length " + std::to_string(assignment.size()) +
                     " != feature rows " + std::to_string(f.rows()));
  const auto frames = static_cast<Eigen::Index>(tl.frames);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(frames, f.dims());
  std::vector<std::size_t> counts(tl.frames, 0);
  for (std::size_t m = 0; m < assignment.size(); ++m) {
    const auto frame = assignment[m];
    if (frame >= tl.frames) throw InputError("word " + std::to_string(m) + " assigned past last frame");
    pooled.row(static_cast<Eigen::Index>(frame)) +=
        f.values.row(static_cast<Eigen::Index>(m)).cast<double>();
    ++counts[frame];
  }
  for (Eigen::Index i = 0; i < frames; ++i)
    if (counts[static_cast<std::size_t>(i)] > 1)
      pooled.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  return pooled;
}

DesignMatrix fir_expand(const Eigen::MatrixXd& pooled, std::size_t lags) {
  if (lags == 0) throw InputError("FIR lag count must be at least 1");
  const auto frames = pooled.rows();
  const auto dims = pooled.cols();
  if (static_cast<Eigen::Index>(lags) > frames)
    throw InputError("FIR lag count " + std::to_string(lags) + " exceeds frame count " +
                     std::to_string(frames));
  DesignMatrix out;
  out.lags = lags;
  out.values = Eigen::MatrixXd::Zero(frames, static_cast<Eigen::Index>(lags) * dims);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(lags); ++j) {
    const auto n = frames - j;
    out.values.block(j, j * dims, n, dims) = pooled.topRows(n);
  }
  return out;
}

DesignMatrix build_design(const features::FeatureMatrix& f, const stimulus::Transcript& t,
                          const FrameTimeline& tl, std::size_t lags) {
  features::validate_pair(f, t);
  const auto onsets = t.onsets();
  const auto assignment = assign_words_to_frames(onsets, tl);
  return fir_expand(pool_by_frame(f, assignment, tl), lags);
}

}  // namespace voxenc::alignment
