#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "voxenc/stimulus.hpp"

namespace voxenc::features {

using FloatRows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-word activations of one model layer. Row i belongs to token i of the
/// companion transcript. Stored in float32 (the on-disk precision); the
/// pipeline converts to double when pooling.
struct FeatureMatrix {
  FloatRows values;
  std::int32_t layer_id = 0;  // 0 = non-contextual embedding table
  std::int32_t context_length = 0;
  std::string model_tag;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index dims() const noexcept { return values.cols(); }
};

inline constexpr std::uint32_t kFeatVersion = 1;

FeatureMatrix read_features(std::istream& in);
FeatureMatrix load_features(const std::string& path);

/// Canonical little-endian serialization; equal matrices give equal bytes.
void write_features(std::ostream& out, const FeatureMatrix& f);
void save_features(const std::string& path, const FeatureMatrix& f);
std::vector<char> encode_features(const FeatureMatrix& f);

/// Throws InputError unless the matrix has one row per transcript token.
void validate_pair(const FeatureMatrix& f, const stimulus::Transcript& t);

}  // namespace voxenc::features
