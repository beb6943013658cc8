#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "test_support.hpp"
#include "voxenc/bold.hpp"
#include "voxenc/features.hpp"
#include "voxenc/scoremap.hpp"
#include "voxenc/scoring.hpp"
#include "voxenc/stimulus.hpp"

using namespace voxenc;
using voxenc::testing::slurp;
using voxenc::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "voxenc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> small_synth(const std::string& dir, const std::string& subjects = "3",
                                     const std::string& noise = "0.5", const std::string& memory = "0") {
  return {"synth", "--out-dir", dir, "--set", "words=800", "--set", "frames=400", "--set", "dims=6",
          "--set", "voxels=40", "--set", "subjects=" + subjects, "--set", "k_true=3",
          "--set", "subject_noise=" + noise, "--set", "memory_tokens=" + memory, "--seed", "5"};
}

std::vector<std::string> score_args(const TempDir& d, const std::string& out) {
  return {"score", "--transcript", d / "data/transcript.tsv", "--features", d / "data/features.feat",
          "--bold-dir", d / "data/bold", "--config", d / "data/run.cfg", "--out", out};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  CHECK(call({"--help"}).code == 0);
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"score", "--out", "x"}).code == 2);
}

TEST_CASE("synth then score") {
  TempDir d("cli-score");
  REQUIRE(call(small_synth(d / "data")).code == 0);
  CHECK_FALSE(std::filesystem::exists(d / "data/transcript_informative.tsv"));
  TempDir h("cli-hidden");
  REQUIRE(call(small_synth(h / "data", "3", "0.5", "2")).code == 0);
  for (auto f : {"transcript.tsv", "features.feat", "truth.json", "atlas.tsv", "run.cfg",
                 "bold/sub-1.bold", "bold/sub-3.bold"})
    CHECK(std::filesystem::exists(d / (std::string("data/") + f)));
  for (auto f : {"transcript_informative.tsv", "features_uninformative.feat", "annotations_informative.tsv"})
    CHECK(std::filesystem::exists(h / (std::string("data/") + f)));

  const auto r = call(score_args(d, d / "out/brain"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto m = scoring::load_score_map(d / "out/brain.csv");
  const auto truth = nlohmann::json::parse(slurp(d / "data/truth.json"));
  CHECK(std::abs(*m.mean() - truth["expected_score"].get<double>()) < 0.05);
  const auto side = nlohmann::json::parse(slurp(d / "out/brain.json"));
  CHECK(side["kind"] == "brain");
  CHECK(side["config"]["k"] == 3);
  CHECK(side["config"]["seed"] == 5);
}

TEST_CASE("input failures exit with code 2") {
  TempDir d("cli-fail");
  REQUIRE(call(small_synth(d / "data")).code == 0);
  auto args = score_args(d, d / "out/brain");
  args[2] = d / "missing.tsv";
  CHECK(call(args).code == 2);

  std::ofstream(d / "nok.cfg") << "inner_folds = 5\n";
  args = score_args(d, d / "out/brain");
  args[8] = d / "nok.cfg";
  const auto r = call(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("'k'") != std::string::npos);

  std::ofstream(d / "bad.cfg") << "k = 3\nbogus = 1\n";
  args[8] = d / "bad.cfg";
  CHECK(call(args).code == 2);
}

TEST_CASE("per-subject scoring") {
  TempDir d("cli-subject");
  REQUIRE(call(small_synth(d / "data", "1")).code == 0);
  auto pooled = score_args(d, d / "out/pooled");
  pooled.insert(pooled.end(), {"--set", "outer_folds_pooled=5"});
  REQUIRE(call(pooled).code == 0);
  auto each = score_args(d, d / "out/each");
  each.push_back("--per-subject");
  REQUIRE(call(each).code == 0);
  CHECK(slurp(d / "out/each_sub-1.csv") == slurp(d / "out/pooled.csv"));
}

TEST_CASE("results do not depend on workers or reruns") {
  TempDir d("cli-workers");
  REQUIRE(call(small_synth(d / "data")).code == 0);
  auto one = score_args(d, d / "one");
  one.insert(one.end(), {"--workers", "1"});
  auto eight = score_args(d, d / "eight");
  eight.insert(eight.end(), {"--workers", "8"});
  REQUIRE(call(one).code == 0);
  REQUIRE(call(eight).code == 0);
  CHECK(slurp(d / "one.csv") == slurp(d / "eight.csv"));
  CHECK(slurp(d / "one.json") == slurp(d / "eight.json"));
  const auto first = slurp(d / "one.csv");
  REQUIRE(call(one).code == 0);
  CHECK(slurp(d / "one.csv") == first);

  TempDir e("cli-synth-again");
  REQUIRE(call(small_synth(e / "data")).code == 0);
  CHECK(slurp(d / "data/bold/sub-2.bold") == slurp(e / "data/bold/sub-2.bold"));
}

TEST_CASE("ceiling") {
  TempDir d("cli-ceiling");
  REQUIRE(call(small_synth(d / "data", "4")).code == 0);
  REQUIRE(call({"ceiling", "--bold-dir", d / "data/bold", "--out", d / "ceil", "--set", "n_ceiling_splits=10"}).code == 0);
  const auto c = scoring::load_score_map(d / "ceil.csv");
  CHECK(c.kind == scoring::ScoreKind::ceiling);
  CHECK(c.voxels() == 40);
  const auto truth = nlohmann::json::parse(slurp(d / "data/truth.json"));
  CHECK(std::abs(*c.mean() - truth["expected_ceiling"].get<double>()) < 0.08);
  CHECK(call({"ceiling", "--bold-dir", d / "nothing", "--out", d / "x"}).code == 2);
}

TEST_CASE("diff") {
  TempDir d("cli-diff");
  std::ofstream(d / "a.csv") << "voxel_index,score,defined\n0,0.12,1\n1,0.002,1\n2,0.4,1\n";
  std::ofstream(d / "b.csv") << "voxel_index,score,defined\n0,0.1,1\n1,0.001,1\n2,0.4,1\n";
  REQUIRE(call({"diff", d / "a.csv", d / "a.csv", "--out", d / "same"}).code == 0);
  const auto same = scoring::load_score_map(d / "same.csv");
  CHECK(same.kind == scoring::ScoreKind::memory);
  CHECK(same.values.isZero(0.0));

  REQUIRE(call({"diff", d / "a.csv", d / "b.csv", "--mode", "tuning", "--out", d / "tune"}).code == 0);
  const auto t = scoring::load_score_map(d / "tune.csv");
  const auto expected = scoring::tuning_score(scoring::load_score_map(d / "a.csv"),
                                              scoring::load_score_map(d / "b.csv"), 0.01);
  CHECK(t.defined == expected.defined);
  CHECK(*t.at(0) == doctest::Approx(*expected.at(0)).epsilon(1e-12));
  CHECK_FALSE(t.at(1).has_value());
  const auto side = nlohmann::json::parse(slurp(d / "tune.json"));
  CHECK(side["config"]["mode"] == "tuning");
  CHECK(side["config"]["eps"] == 0.01);

  std::ofstream(d / "short.csv") << "voxel_index,score,defined\n0,0.1,1\n";
  CHECK(call({"diff", d / "a.csv", d / "short.csv", "--out", d / "x"}).code == 2);
  CHECK(call({"diff", d / "a.csv", d / "b.csv", "--mode", "ratio", "--out", d / "x"}).code == 2);
}

TEST_CASE("roi tables") {
  TempDir d("cli-roi");
  std::ofstream(d / "atlas.tsv") << "voxel_index\themisphere\tlabel\n0\tL\tS_front_inf\n1\tL\tS_front_inf\n2\tR\tG_front_sup\n";
  std::ofstream(d / "labels.txt") << "S_front_inf\nG_front_sup\n";
  std::ofstream(d / "m1.csv") << "voxel_index,score,defined\n0,0.1,1\n1,0.3,1\n2,0.5,1\n";
  std::ofstream(d / "m2.csv") << "voxel_index,score,defined\n0,0.3,1\n1,0.5,1\n2,0.5,1\n";
  REQUIRE(call({"roi", d / "m1.csv", "--atlas", d / "atlas.tsv", "--labels", d / "labels.txt", "--out", d / "one.csv"}).code == 0);
  CHECK(slurp(d / "one.csv") ==
        "label,hemisphere,mean,ci_low,ci_high,n_voxels,n_subjects\n"
        "S_front_inf,L,0.2,nan,nan,2,1\nS_front_inf,R,nan,nan,nan,0,0\n"
        "G_front_sup,L,nan,nan,nan,0,0\nG_front_sup,R,0.5,nan,nan,1,1\n");
  REQUIRE(call({"roi", d / "m*.csv", "--atlas", d / "atlas.tsv", "--labels", d / "labels.txt", "--out", d / "ci.csv"}).code == 0);
  std::istringstream ci(slurp(d / "ci.csv"));
  std::string header, row;
  std::getline(ci, header);
  std::getline(ci, row);
  CHECK(row.rfind("S_front_inf,L,", 0) == 0);
  CHECK(std::stod(row.substr(14)) == doctest::Approx(0.3));
  CHECK(row.substr(row.size() - 4) == ",2,2");
  std::ofstream(d / "bad_atlas.tsv") << "0\tL\tS_front_inf\n0\tL\tS_front_inf\n";
  CHECK(call({"roi", d / "m1.csv", "--atlas", d / "bad_atlas.tsv", "--out", d / "x.csv"}).code == 2);
}

TEST_CASE("augment") {
  TempDir d("cli-augment");
  REQUIRE(call(small_synth(d / "data", "3", "0.5", "2")).code == 0);
  REQUIRE(call({"augment", "--transcript", d / "data/transcript.tsv", "--annotations",
                d / "data/annotations_informative.tsv", "--out", d / "merged.tsv"}).code == 0);
  CHECK(slurp(d / "merged.tsv") == slurp(d / "data/transcript_informative.tsv"));
  std::ofstream(d / "bad.tsv") << "sentence_id\tlevel\tcontent\n99999\tword\tx\n";
  CHECK(call({"augment", "--transcript", d / "data/transcript.tsv", "--annotations", d / "bad.tsv",
              "--out", d / "x.tsv"}).code == 2);
}

TEST_CASE("layers") {
  TempDir d("cli-layers");
  REQUIRE(call(small_synth(d / "data", "3", "1.0")).code == 0);
  auto noise = features::load_features(d / "data/features.feat");
  std::mt19937_64 rng(2);
  noise.values = testing::gaussian(noise.rows(), noise.dims(), rng).cast<float>();
  noise.layer_id = 7;
  features::save_features(d / "data/layer7.feat", noise);
  auto base = std::vector<std::string>{"layers", "--transcript", d / "data/transcript.tsv", "--bold-dir",
                                       d / "data/bold", "--config", d / "data/run.cfg"};
  auto args = base;
  args.insert(args.end(), {"--features", d / "data/*.feat", "--atlas", d / "data/atlas.tsv", "--out", d / "layers.csv"});
  REQUIRE(call(args).code == 0);
  std::istringstream csv(slurp(d / "layers.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "layer_id,hemisphere,mean_score,n_voxels");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][0] == "0");
  CHECK(rows[0][1] == "L");
  CHECK(rows[2][1] == "all");
  CHECK(rows[2][3] == "40");
  CHECK(rows[5][0] == "7");
  CHECK(std::stod(rows[2][2]) > std::stod(rows[5][2]));

  args = base;
  args.insert(args.end(), {"--features", d / "data/features.feat", "--out", d / "single.csv"});
  REQUIRE(call(args).code == 0);
  auto score = score_args(d, d / "pooled");
  REQUIRE(call(score).code == 0);
  const auto pooled = scoring::load_score_map(d / "pooled.csv");
  std::istringstream single(slurp(d / "single.csv"));
  std::getline(single, line);
  std::getline(single, line);
  CHECK(line.rfind("0,all,", 0) == 0);
  CHECK(std::stod(line.substr(6)) == doctest::Approx(*pooled.mean()).epsilon(1e-12));

  args = base;
  args.insert(args.end(), {"--features", d / "data/features.feat", "--features", d / "data/features.feat",
                           "--out", d / "dup.csv"});
  CHECK(call(args).code == 2);
}

}  // TEST_SUITE
