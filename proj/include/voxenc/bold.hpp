#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "voxenc/alignment.hpp"

namespace voxenc::scoring {

/// BOLD recording of one subject listening to one story.
struct BoldRun {
  std::string subject_id;
  std::string story_id;
  alignment::FrameTimeline timeline;
  Eigen::MatrixXd values;  // frames x voxels

  Eigen::Index frames() const noexcept { return values.rows(); }
  Eigen::Index voxels() const noexcept { return values.cols(); }
  void validate() const;
};

inline constexpr std::uint32_t kBoldVersion = 1;

BoldRun read_bold(std::istream& in);
BoldRun load_bold(const std::string& path);
std::vector<char> encode_bold(const BoldRun& run);
void write_bold(std::ostream& out, const BoldRun& run);
void save_bold(const std::string& path, const BoldRun& run);

/// Every `*.bold` file in `dir`, ordered by file name. All runs must share
/// frame count, voxel count and timeline.
std::vector<BoldRun> load_bold_dir(const std::string& dir);

}  // namespace voxenc::scoring
