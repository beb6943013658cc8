#include "voxenc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "text_format.hpp"
#include "voxenc/alignment.hpp"
#include "voxenc/errors.hpp"

namespace voxenc::synth {

namespace {

constexpr double kMaxWordDuration = 0.4;

std::size_t as_count(const std::string& key, const std::string& v) {
  const auto n = detail::parse_uint(v);
  if (!n) throw InputError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(*n);
}

double as_real(const std::string& key, const std::string& v) {
  const auto x = detail::parse_double(v);
  if (!x) throw InputError("config key '" + key + "' expects a number, got '" + v + "'");
  return *x;
}

double round_ms(double t) { return std::round(t * 1000.0) / 1000.0; }

std::string hidden_name(std::uint64_t sentence, std::size_t j, bool informative) {
  return (informative ? "mem" : "rnd") + std::to_string(sentence) + "_" + std::to_string(j);
}

std::vector<stimulus::AugmentationRecord> records_for(const stimulus::Transcript& t,
                                                      std::size_t per_sentence, bool informative) {
  std::vector<stimulus::AugmentationRecord> records;
  if (per_sentence == 0) return records;
  for (const auto& [sid, span] : stimulus::sentence_spans(t)) {
    std::string content;
    for (std::size_t j = 0; j < per_sentence; ++j) {
      if (j) content += ' ';
      content += hidden_name(sid, j, informative);
    }
    records.push_back({sid, stimulus::AugmentationLevel::word, content});
  }
  return records;
}

// Transcript with hidden tokens merged in, plus the matching feature rows.
std::pair<stimulus::Transcript, features::FeatureMatrix> with_inserted(
    const stimulus::Transcript& t, const features::FeatureMatrix& f,
    const features::FloatRows& inserted, std::size_t per_sentence, bool informative) {
  if (per_sentence == 0) return {t, f};
  const auto records = records_for(t, per_sentence, informative);
  auto merged = stimulus::merge_augmentation(t, records);

  features::FeatureMatrix out;
  out.layer_id = f.layer_id;
  out.context_length = f.context_length;
  out.model_tag = f.model_tag;
  out.values.resize(static_cast<Eigen::Index>(merged.size()), f.dims());
  std::size_t base = 0;
  std::size_t extra = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (base < t.size() && merged.tokens[i] == t.tokens[base])
      out.values.row(row) = f.values.row(static_cast<Eigen::Index>(base++));
    else
      out.values.row(row) = inserted.row(static_cast<Eigen::Index>(extra++));
  }
  return {std::move(merged), std::move(out)};
}

double split_half(double shared, double noise_a, double noise_b) {
  if (shared == 0.0) return 0.0;
  return shared / std::sqrt((shared + noise_a) * (shared + noise_b));
}

}  // namespace

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  double u = 0.0;
  do {
    u = uniform01(rng);
  } while (u == 0.0);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

double SynthConfig::noise_of(std::size_t subject) const {
  return subject_noise_each.empty() ? subject_noise : subject_noise_each.at(subject);
}

void SynthConfig::validate() const {
  if (words == 0 || dims == 0 || frames == 0 || voxels == 0 || subjects == 0 || k_true == 0 ||
      sentence_length == 0)
    throw InputError("synth counts must be at least 1");
  if (!(tr > 0.0) || !std::isfinite(tr)) throw InputError("tr must be positive");
  if (!std::isfinite(t0)) throw InputError("t0 must be finite");
  if (k_true > frames) throw InputError("k_true exceeds the frame count");
  if (!(signal_scale >= 0.0) || !(subject_noise >= 0.0) || !(shared_noise >= 0.0))
    throw InputError("signal and noise scales must be non-negative");
  if (!subject_noise_each.empty()) {
    if (subject_noise_each.size() != subjects)
      throw InputError("per-subject noise list must have one entry per subject");
    for (double s : subject_noise_each)
      if (!(s >= 0.0)) throw InputError("noise scales must be non-negative");
  }
}

nlohmann::json SynthConfig::to_json() const {
  nlohmann::json j;
  j["words"] = words;
  j["dims"] = dims;
  j["frames"] = frames;
  j["tr"] = tr;
  j["t0"] = t0;
  j["voxels"] = voxels;
  j["subjects"] = subjects;
  j["k_true"] = k_true;
  j["signal_scale"] = signal_scale;
  j["subject_noise"] = subject_noise;
  j["shared_noise"] = shared_noise;
  j["sentence_length"] = sentence_length;
  j["memory_tokens"] = memory_tokens;
  j["layer_id"] = layer_id;
  j["seed"] = seed;
  if (!subject_noise_each.empty()) j["subject_noise_each"] = subject_noise_each;
  return j;
}

SynthConfig apply_synth_keys(const KeyValues& kv, SynthConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "words") base.words = as_count(key, value);
    else if (key == "dims") base.dims = as_count(key, value);
    else if (key == "frames") base.frames = as_count(key, value);
    else if (key == "tr") base.tr = as_real(key, value);
    else if (key == "t0") base.t0 = as_real(key, value);
    else if (key == "voxels") base.voxels = as_count(key, value);
    else if (key == "subjects") base.subjects = as_count(key, value);
    else if (key == "k_true") base.k_true = as_count(key, value);
    else if (key == "signal_scale") base.signal_scale = as_real(key, value);
    else if (key == "subject_noise") base.subject_noise = as_real(key, value);
    else if (key == "shared_noise") base.shared_noise = as_real(key, value);
    else if (key == "sentence_length") base.sentence_length = as_count(key, value);
    else if (key == "memory_tokens") base.memory_tokens = as_count(key, value);
    else if (key == "layer_id") base.layer_id = static_cast<std::int32_t>(as_count(key, value));
    else if (key == "seed") base.seed = as_count(key, value);
    else if (!is_run_key(key)) throw InputError("unknown config key '" + key + "'");
  }
  base.validate();
  return base;
}

nlohmann::json GroundTruth::to_json(std::size_t max_weights) const {
  nlohmann::json j;
  j["k_true"] = k_true;
  j["weight_rows"] = weights.rows();
  j["voxels"] = weights.cols();
  j["hidden_tokens"] = memory.rows();
  if (static_cast<std::size_t>(weights.size()) <= max_weights) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
      std::vector<double> row(weights.cols());
      for (Eigen::Index c = 0; c < weights.cols(); ++c) row[c] = weights(r, c);
      w.push_back(std::move(row));
    }
    j["weights"] = std::move(w);
  }
  return j;
}

alignment::FrameTimeline Dataset::timeline() const {
  return {config.frames, config.tr, config.t0};
}

Dataset generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Dataset ds;
  ds.config = cfg;
  const auto tl = ds.timeline();
  const double span = static_cast<double>(cfg.frames) * cfg.tr;

  std::vector<double> onsets(cfg.words);
  for (auto& o : onsets) o = round_ms(cfg.t0 + span * uniform01(rng));
  std::sort(onsets.begin(), onsets.end());
  auto& t = ds.transcript;
  t.story_id = "synth";
  t.tokens.reserve(cfg.words);
  for (std::size_t i = 0; i < cfg.words; ++i) {
    const double next = i + 1 < cfg.words ? onsets[i + 1] : onsets[i] + kMaxWordDuration;
    const double offset = std::max(onsets[i], round_ms(std::min(onsets[i] + kMaxWordDuration,
                                                                (onsets[i] + next) / 2.0)));
    t.tokens.push_back({"w" + std::to_string(i), onsets[i], std::min(offset, next),
                        static_cast<std::uint64_t>(i / cfg.sentence_length)});
  }

  auto& f = ds.features;
  f.layer_id = cfg.layer_id;
  f.model_tag = "synth";
  f.values.resize(static_cast<Eigen::Index>(cfg.words), static_cast<Eigen::Index>(cfg.dims));
  for (Eigen::Index i = 0; i < f.values.rows(); ++i)
    for (Eigen::Index c = 0; c < f.values.cols(); ++c)
      f.values(i, c) = static_cast<float>(standard_normal(rng));

  const auto sentences = stimulus::sentence_spans(t).size();
  auto& truth = ds.truth;
  truth.k_true = cfg.k_true;
  truth.memory.resize(static_cast<Eigen::Index>(sentences * cfg.memory_tokens),
                      static_cast<Eigen::Index>(cfg.dims));
  for (Eigen::Index i = 0; i < truth.memory.rows(); ++i)
    for (Eigen::Index c = 0; c < truth.memory.cols(); ++c)
      truth.memory(i, c) = static_cast<float>(standard_normal(rng));

  const auto p = static_cast<Eigen::Index>(cfg.k_true * cfg.dims);
  const auto v = static_cast<Eigen::Index>(cfg.voxels);
  truth.weights.resize(p, v);
  for (Eigen::Index j = 0; j < v; ++j) {
    for (Eigen::Index r = 0; r < p; ++r) truth.weights(r, j) = standard_normal(rng);
    const double norm = truth.weights.col(j).norm();
    if (norm > 0.0) truth.weights.col(j) /= norm;
  }

  const auto [full_t, full_f] = with_inserted(t, f, truth.memory, cfg.memory_tokens, true);
  const auto design = alignment::build_design(full_f, full_t, tl, cfg.k_true);
  truth.signal = design.values * truth.weights;
  for (Eigen::Index j = 0; j < v; ++j) {
    auto col = truth.signal.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size()));
    if (sd > 0.0) col *= cfg.signal_scale / sd;
    else col.setZero();
  }

  const auto n = static_cast<Eigen::Index>(cfg.frames);
  Eigen::MatrixXd shared(n, v);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < v; ++j) shared(i, j) = standard_normal(rng);
  const Eigen::MatrixXd common = truth.signal + cfg.shared_noise * shared;

  ds.runs.reserve(cfg.subjects);
  const int width = static_cast<int>(std::to_string(cfg.subjects).size());
  for (std::size_t s = 0; s < cfg.subjects; ++s) {
    scoring::BoldRun run;
    auto id = std::to_string(s + 1);
    run.subject_id = "sub-" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0') + id;
    run.story_id = t.story_id;
    run.timeline = tl;
    run.values.resize(n, v);
    const double sigma = cfg.noise_of(s);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < v; ++j) {
        const double y = common(i, j) + sigma * standard_normal(rng);
        run.values(i, j) = static_cast<double>(static_cast<float>(y));
      }
    ds.runs.push_back(std::move(run));
  }
  return ds;
}

double expected_score(const SynthConfig& cfg) {
  cfg.validate();
  const double s2 = cfg.signal_scale * cfg.signal_scale;
  if (s2 == 0.0) return 0.0;
  const auto T = static_cast<double>(cfg.subjects);
  double noise = 0.0;
  for (std::size_t j = 0; j < cfg.subjects; ++j) noise += cfg.noise_of(j) * cfg.noise_of(j);
  noise /= T * T;
  return cfg.signal_scale / std::sqrt(s2 + cfg.shared_noise * cfg.shared_noise + noise);
}

double expected_ceiling(const SynthConfig& cfg) {
  cfg.validate();
  if (cfg.subjects < 2) throw InputError("split-half ceiling needs at least 2 subjects");
  const double shared = cfg.signal_scale * cfg.signal_scale + cfg.shared_noise * cfg.shared_noise;
  const std::size_t T = cfg.subjects;
  const std::size_t half = T / 2;
  if (cfg.subject_noise_each.empty()) {
    const double s2 = cfg.subject_noise * cfg.subject_noise;
    return split_half(shared, s2 / static_cast<double>(half), s2 / static_cast<double>(T - half));
  }
  if (T > 24) throw InputError("per-subject noise ceiling is enumerated only up to 24 subjects");
  std::vector<bool> in_a(T, false);
  std::fill(in_a.begin(), in_a.begin() + static_cast<std::ptrdiff_t>(half), true);
  std::sort(in_a.begin(), in_a.end());
  double sum = 0.0;
  std::size_t count = 0;
  do {
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t j = 0; j < T; ++j) (in_a[j] ? na : nb) += cfg.noise_of(j) * cfg.noise_of(j);
    na /= static_cast<double>(half * half);
    nb /= static_cast<double>((T - half) * (T - half));
    sum += split_half(shared, na, nb);
    ++count;
  } while (std::next_permutation(in_a.begin(), in_a.end()));
  return sum / static_cast<double>(count);
}

std::vector<stimulus::AugmentationRecord> augmentation_records(const Dataset& base,
                                                               std::size_t extra_tokens,
                                                               bool informative) {
  return records_for(base.transcript, extra_tokens, informative);
}

std::pair<stimulus::Transcript, features::FeatureMatrix> generate_augmented(
    const Dataset& base, std::size_t extra_tokens, bool informative, std::uint64_t seed) {
  const auto m = base.config.memory_tokens;
  if (informative && extra_tokens > m)
    throw InputError("cannot reveal " + std::to_string(extra_tokens) + " hidden tokens per sentence; only " +
                     std::to_string(m) + " exist");
  const auto sentences = static_cast<Eigen::Index>(stimulus::sentence_spans(base.transcript).size());
  const auto d = base.features.dims();
  const auto e = static_cast<Eigen::Index>(extra_tokens);
  features::FloatRows inserted(sentences * e, d);
  if (informative) {
    for (Eigen::Index s = 0; s < sentences; ++s)
      inserted.middleRows(s * e, e) = base.truth.memory.middleRows(s * static_cast<Eigen::Index>(m), e);
  } else {
    std::mt19937_64 rng(seed);
    for (Eigen::Index i = 0; i < inserted.rows(); ++i)
      for (Eigen::Index c = 0; c < d; ++c) inserted(i, c) = static_cast<float>(standard_normal(rng));
  }
  return with_inserted(base.transcript, base.features, inserted, extra_tokens, informative);
}

}  // namespace voxenc::synth
