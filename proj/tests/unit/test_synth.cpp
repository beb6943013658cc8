#include "doctest.h"

#include <cmath>

#include "voxenc/alignment.hpp"
#include "voxenc/bold.hpp"
#include "voxenc/errors.hpp"
#include "voxenc/features.hpp"
#include "voxenc/synth.hpp"

using namespace voxenc;
using namespace voxenc::synth;

namespace {

SynthConfig tiny() {
  SynthConfig c;
  c.words = 400;
  c.frames = 200;
  c.dims = 4;
  c.voxels = 12;
  c.subjects = 3;
  c.k_true = 2;
  c.seed = 8;
  return c;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("shapes and transcript") {
  const auto ds = generate(tiny());
  CHECK(ds.transcript.size() == 400);
  CHECK(ds.features.rows() == 400);
  CHECK(ds.features.dims() == 4);
  REQUIRE(ds.runs.size() == 3);
  CHECK(ds.runs[0].subject_id == "sub-1");
  CHECK(ds.runs[2].frames() == 200);
  CHECK(ds.truth.weights.rows() == 8);
  for (Eigen::Index j = 0; j < 12; ++j) CHECK(ds.truth.weights.col(j).norm() == doctest::Approx(1.0));
  double prev = -1.0;
  for (const auto& w : ds.transcript.tokens) {
    CHECK(w.onset >= prev);
    CHECK(w.offset >= w.onset);
    CHECK(w.onset < 400.0);
    prev = w.onset;
  }
  CHECK(ds.transcript.tokens[17].sentence_id == 2);
  CHECK_NOTHROW(stimulus::validate(ds.transcript));
}

TEST_CASE("noise-free runs equal the signal") {
  auto cfg = tiny();
  cfg.subject_noise = 0.0;
  const auto ds = generate(cfg);
  const Eigen::MatrixXd rounded = ds.truth.signal.cast<float>().cast<double>();
  for (const auto& r : ds.runs) CHECK(r.values == rounded);
  const auto design = alignment::build_design(ds.features, ds.transcript, ds.timeline(), cfg.k_true);
  Eigen::MatrixXd c = design.values * ds.truth.weights;
  c.rowwise() -= c.colwise().mean();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    c.col(j) /= std::sqrt(c.col(j).squaredNorm() / static_cast<double>(c.rows()));
  }
  CHECK((c - ds.truth.signal).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("signal variance") {
  auto cfg = tiny();
  cfg.frames = 2000;
  cfg.words = 4000;
  cfg.signal_scale = 1.5;
  const auto ds = generate(cfg);
  for (Eigen::Index j = 0; j < ds.truth.signal.cols(); ++j) {
    const auto col = ds.truth.signal.col(j);
    const double var = (col.array() - col.mean()).square().mean();
    CHECK(std::abs(var / 2.25 - 1.0) < 0.05);
  }
}

TEST_CASE("seeds give reproducible bytes") {
  const auto a = generate(tiny());
  const auto b = generate(tiny());
  for (std::size_t s = 0; s < a.runs.size(); ++s)
    CHECK(scoring::encode_bold(a.runs[s]) == scoring::encode_bold(b.runs[s]));
  CHECK(features::encode_features(a.features) == features::encode_features(b.features));
  CHECK(a.transcript == b.transcript);
  auto other = tiny();
  other.seed = 9;
  CHECK(generate(other).runs[0].values != a.runs[0].values);
}

TEST_CASE("expected score") {
  SynthConfig c;
  c.subject_noise = 0.0;
  CHECK(expected_score(c) == 1.0);
  c.subjects = 1;
  c.subject_noise = 1.0;
  CHECK(expected_score(c) == doctest::Approx(0.7071).epsilon(1e-4));
  c.subjects = 4;
  CHECK(expected_score(c) == doctest::Approx(0.8944).epsilon(1e-4));
  c.subject_noise = 3.0;
  CHECK(expected_score(c) == doctest::Approx(1.0 / std::sqrt(1.0 + 9.0 / 4.0)));
}

TEST_CASE("expected ceiling") {
  SynthConfig c;
  c.subjects = 8;
  CHECK(expected_ceiling(c) == doctest::Approx(0.8));
  c.subject_noise_each = {1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(expected_ceiling(c) == doctest::Approx(0.8));
  c.subjects = 2;
  c.subject_noise_each = {0.0, 1.0};
  CHECK(expected_ceiling(c) == doctest::Approx(1.0 / std::sqrt(2.0)));
  c.subjects = 1;
  c.subject_noise_each.clear();
  CHECK_THROWS_AS(expected_ceiling(c), InputError);
}

TEST_CASE("augmentation") {
  auto cfg = tiny();
  cfg.memory_tokens = 2;
  const auto ds = generate(cfg);
  const auto sentences = stimulus::sentence_spans(ds.transcript).size();
  CHECK(ds.truth.memory.rows() == static_cast<Eigen::Index>(2 * sentences));

  const auto [t0, f0] = generate_augmented(ds, 0, true);
  CHECK(t0 == ds.transcript);
  CHECK(f0.values == ds.features.values);

  const auto [t, f] = generate_augmented(ds, 2, true);
  CHECK(t.size() == ds.transcript.size() + 2 * sentences);
  CHECK(f.rows() == static_cast<Eigen::Index>(t.size()));
  const auto spans = stimulus::sentence_spans(t);
  const auto [first, last] = spans.at(0);
  CHECK(t.tokens[last].text == "mem0_1");
  CHECK(t.tokens[last].onset == t.tokens[last].offset);
  CHECK(f.values.row(static_cast<Eigen::Index>(last)) == ds.truth.memory.row(1));
  (void)first;

  const auto [tu, fu] = generate_augmented(ds, 2, false);
  CHECK(tu.tokens[last].text == "rnd0_1");
  CHECK(fu.values.row(static_cast<Eigen::Index>(last)) != ds.truth.memory.row(1));

  const auto records = augmentation_records(ds, 2, true);
  CHECK(records.size() == sentences);
  CHECK(records[0].content == "mem0_0 mem0_1");
  CHECK(stimulus::merge_augmentation(ds.transcript, records) == t);
  CHECK_THROWS_AS(generate_augmented(ds, 3, true), InputError);
  CHECK_NOTHROW(generate_augmented(ds, 3, false));
}

TEST_CASE("config validation and keys") {
  auto c = tiny();
  c.frames = 0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = tiny();
  c.subject_noise_each = {1.0};
  CHECK_THROWS_AS(c.validate(), InputError);
  c = tiny();
  c.subject_noise = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  const auto applied = apply_synth_keys({{"voxels", "7"}, {"signal_scale", "2"}});
  CHECK(applied.voxels == 7);
  CHECK(applied.signal_scale == 2.0);
}

TEST_CASE("sampling helpers") {
  std::mt19937_64 rng(0);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 1e5) < 0.02);
  CHECK(std::abs(sq / 1e5 - 1.0) < 0.02);
}

}  // TEST_SUITE
