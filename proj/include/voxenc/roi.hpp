#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "voxenc/scoremap.hpp"

namespace voxenc::roi {

enum class Hemisphere { left, right };

/// "L" or "R".
std::string to_string(Hemisphere h);

struct Parcel {
  Hemisphere hemisphere = Hemisphere::left;
  std::string label;

  bool operator==(const Parcel&) const = default;
};

/// Voxel -> parcel assignment. Voxels listed as unmapped carry no parcel and
/// are left out of every cell.
struct Atlas {
  std::map<std::size_t, std::optional<Parcel>> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool operator==(const Atlas&) const = default;
};

/// The 74 sulcal/gyral labels of the Destrieux parcellation (medial wall
/// excluded).
const std::vector<std::string>& destrieux_labels();

/// The nine regions analysed by default.
const std::vector<std::string>& study_labels();

/// TSV with header `voxel_index hemisphere label`. Hemisphere is L or R, or
/// `-` together with label `-` for an explicitly unmapped voxel. Labels must
/// belong to `declared`; an empty set accepts any label.
Atlas parse_atlas(std::istream& in, const std::set<std::string>& declared);
Atlas parse_atlas(std::istream& in);
Atlas load_atlas(const std::string& path);
Atlas load_atlas(const std::string& path, const std::set<std::string>& declared);
void write_atlas(std::ostream& out, const Atlas& a);

/// One non-empty line per label: the label set of a table.
std::vector<std::string> parse_labels(std::istream& in);
std::vector<std::string> load_labels(const std::string& path);

struct Cell {
  std::string label;
  Hemisphere hemisphere = Hemisphere::left;
  std::optional<double> mean;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::size_t n_voxels = 0;    // defined voxels averaged
  std::size_t n_subjects = 0;  // subjects with a defined cell mean
};

/// Equal-weight mean of the defined voxels in each (label, hemisphere) cell,
/// ordered by label as given, left before right.
std::vector<Cell> roi_mean(const scoring::ScoreMap& s, const Atlas& a,
                           std::span<const std::string> labels);

/// Per-cell Student-t interval over subject cell means. Cells with fewer
/// than two defined subjects keep the mean but no interval.
std::vector<Cell> roi_ci(std::span<const scoring::ScoreMap> maps, const Atlas& a,
                         std::span<const std::string> labels, double level = 0.95);

/// CSV: `label,hemisphere,mean,ci_low,ci_high,n_voxels,n_subjects`.
void write_roi_csv(std::ostream& out, std::span<const Cell> cells);

}  // namespace voxenc::roi
