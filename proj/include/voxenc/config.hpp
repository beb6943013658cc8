#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"
#include "voxenc/ridge.hpp"

namespace voxenc {

/// Settings shared by every scoring pipeline.
struct RunConfig {
  std::size_t lags = 5;  // FIR lags (k)
  ridge::PenaltyGrid penalty_grid = ridge::PenaltyGrid::defaults();
  std::size_t outer_folds_pooled = 20;
  std::size_t outer_folds_subject = 5;
  std::size_t inner_folds = 5;
  double eps = 0.01;  // |base| below this masks the tuning ratio
  std::size_t ceiling_splits = 20;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = OpenMP default; never affects results
  ridge::Backend backend = ridge::Backend::parallel;

  void validate() const;
  ridge::RidgeOptions ridge_options() const;
  /// Result-relevant settings, echoed into output sidecars. Worker count and
  /// backend are left out since they do not change any output.
  nlohmann::json to_json() const;
};

/// Plain `key = value` lines; `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

/// Accepts "0.1,1,10" or "logspace(lo,hi,n)" (exponents of ten).
ridge::PenaltyGrid parse_penalty_grid(const std::string& text);
std::string format_penalty_grid(const ridge::PenaltyGrid& g);

/// Applies the run keys present in `kv` on top of `base`. Keys that belong
/// to neither the run nor the synth key set are rejected.
RunConfig apply_run_keys(const KeyValues& kv, RunConfig base = {});

bool is_run_key(const std::string& key);
bool is_synth_key(const std::string& key);

}  // namespace voxenc
