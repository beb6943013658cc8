#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "json.hpp"
#include "voxenc/bold.hpp"
#include "voxenc/config.hpp"
#include "voxenc/features.hpp"
#include "voxenc/stimulus.hpp"

namespace voxenc::synth {

struct SynthConfig {
  std::size_t words = 2000;           // M
  std::size_t dims = 16;              // d
  std::size_t frames = 1000;          // N
  double tr = 2.0;
  double t0 = 0.0;
  std::size_t voxels = 200;           // v
  std::size_t subjects = 4;           // T
  std::size_t k_true = 5;
  double signal_scale = 1.0;          // s
  double subject_noise = 1.0;         // sigma
  double shared_noise = 0.0;          // sigma_shared
  std::size_t sentence_length = 8;
  /// Hidden tokens appended to every sentence. They drive the signal but are
  /// absent from the visible transcript.
  std::size_t memory_tokens = 0;
  std::int32_t layer_id = 0;
  std::uint64_t seed = 0;
  /// Per-subject noise levels; overrides subject_noise when non-empty.
  std::vector<double> subject_noise_each;

  double noise_of(std::size_t subject) const;
  void validate() const;
  nlohmann::json to_json() const;
};

SynthConfig apply_synth_keys(const KeyValues& kv, SynthConfig base = {});

struct GroundTruth {
  Eigen::MatrixXd weights;  // (k_true*d) x v, unit columns
  Eigen::MatrixXd signal;   // C, frames x v
  features::FloatRows memory;  // one row per hidden token, sentence order
  std::size_t k_true = 0;

  /// Weights are left out when they exceed `max_weights` entries.
  nlohmann::json to_json(std::size_t max_weights = 100000) const;
};

struct Dataset {
  SynthConfig config;
  stimulus::Transcript transcript;
  features::FeatureMatrix features;
  std::vector<scoring::BoldRun> runs;
  GroundTruth truth;

  alignment::FrameTimeline timeline() const;
};

Dataset generate(const SynthConfig& cfg);

/// s / sqrt(s^2 + sigma_shared^2 + mean noise variance of the group mean).
double expected_score(const SynthConfig& cfg);

/// Split-half correlation expected from the generative model, averaged over
/// every partition with |A| = floor(T/2).
double expected_ceiling(const SynthConfig& cfg);

/// Appends `extra_tokens` zero-duration words to the end of every sentence.
/// Informative tokens reveal the hidden tokens behind the signal (requires
/// extra_tokens <= memory_tokens); uninformative ones are fresh noise.
std::pair<stimulus::Transcript, features::FeatureMatrix> generate_augmented(
    const Dataset& base, std::size_t extra_tokens, bool informative, std::uint64_t seed = 1);

/// Annotation records matching generate_augmented's insertions.
std::vector<stimulus::AugmentationRecord> augmentation_records(const Dataset& base,
                                                               std::size_t extra_tokens,
                                                               bool informative);

/// Portable sampling helpers: identical streams on every platform.
double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

}  // namespace voxenc::synth
