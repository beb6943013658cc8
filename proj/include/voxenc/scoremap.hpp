#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace voxenc::scoring {

enum class ScoreKind { brain, ceiling, memory, tuning };

std::string to_string(ScoreKind k);
ScoreKind score_kind_from_string(const std::string& s);

/// Per-voxel scalar map. Entries flagged undefined (zero-variance voxels,
/// masked ratios) are excluded from every aggregate.
struct ScoreMap {
  ScoreKind kind = ScoreKind::brain;
  Eigen::VectorXd values;
  std::vector<bool> defined;
  std::string model_tag;
  std::int32_t layer_id = 0;
  std::string story_id;

  Eigen::Index voxels() const noexcept { return values.size(); }
  std::optional<double> at(Eigen::Index j) const;
  std::size_t defined_count() const;
  /// Mean over defined voxels; empty when none is defined.
  std::optional<double> mean() const;
  void validate() const;
};

/// Builds a map from values where NaN marks undefined voxels.
ScoreMap make_score_map(ScoreKind kind, const Eigen::VectorXd& values_with_nan);

/// CSV body: `voxel_index,score,defined`.
void write_score_csv(std::ostream& out, const ScoreMap& m);
ScoreMap read_score_csv(std::istream& in, ScoreKind kind = ScoreKind::brain);

nlohmann::json sidecar(const ScoreMap& m, const nlohmann::json& config);

/// Writes `<prefix>.csv` and `<prefix>.json`.
void save_score_map(const std::string& prefix, const ScoreMap& m, const nlohmann::json& config);

/// Reads a CSV written by save_score_map; metadata comes from the JSON
/// sidecar next to it when present.
ScoreMap load_score_map(const std::string& csv_path);

}  // namespace voxenc::scoring
