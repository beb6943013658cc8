#include "cli.hpp"

#include <glob.h>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "text_format.hpp"
#include "voxenc/bold.hpp"
#include "voxenc/config.hpp"
#include "voxenc/errors.hpp"
#include "voxenc/features.hpp"
#include "voxenc/roi.hpp"
#include "voxenc/scoremap.hpp"
#include "voxenc/scoring.hpp"
#include "voxenc/stimulus.hpp"
#include "voxenc/synth.hpp"

namespace voxenc::cli {

namespace fs = std::filesystem;

namespace {

struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "override one config key (key=value)");
    cmd->add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", seed, "random seed");
  }

  KeyValues merged() const {
    KeyValues kv;
    if (!file.empty()) kv = load_key_values(file);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
      std::istringstream line(s);
      for (auto& [k, v] : parse_key_values(line)) kv[k] = v;
    }
    if (workers) kv["workers"] = std::to_string(*workers);
    if (seed) kv["seed"] = std::to_string(*seed);
    return kv;
  }

  RunConfig run_config(bool needs_k) const {
    const auto kv = merged();
    if (needs_k && !kv.count("k"))
      throw InputError("config key 'k' (FIR lags) is required; pass it in --config or --set k=N");
    return apply_run_keys(kv);
  }
};

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

std::vector<std::string> expand_paths(const std::vector<std::string>& args) {
  std::vector<std::string> paths;
  for (const auto& a : args) {
    if (a.find_first_of("*?[") == std::string::npos) {
      paths.push_back(a);
      continue;
    }
    glob_t g{};
    const int rc = ::glob(a.c_str(), 0, nullptr, &g);
    if (rc == GLOB_NOMATCH) {
      globfree(&g);
      throw InputError("pattern '" + a + "' matches no files");
    }
    if (rc != 0) {
      globfree(&g);
      throw InputError("cannot expand pattern '" + a + "'");
    }
    for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    globfree(&g);
  }
  return paths;
}

std::string format_value(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string("nan");
}

std::optional<double> mean_of(const scoring::ScoreMap& m, const std::vector<Eigen::Index>& voxels,
                              std::size_t& n) {
  double sum = 0.0;
  n = 0;
  for (auto j : voxels) {
    if (const auto v = m.at(j)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voxelwise encoding models for language-model features"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // score
  auto* score = app.add_subcommand("score", "cross-validated brain score against the group mean");
  ConfigArgs score_cfg;
  std::string transcript_path, features_path, bold_dir, out_prefix;
  bool per_subject = false;
  score->add_option("--transcript", transcript_path, "transcript TSV")->required();
  score->add_option("--features", features_path, "FEAT file")->required();
  score->add_option("--bold-dir", bold_dir, "directory of .bold runs")->required();
  score->add_option("--out", out_prefix, "output prefix (writes .csv and .json)")->required();
  score->add_flag("--per-subject", per_subject, "score every run on its own");
  score_cfg.attach(score);

  // ceiling
  auto* ceil = app.add_subcommand("ceiling", "split-half noise ceiling");
  ConfigArgs ceil_cfg;
  std::string ceil_dir, ceil_out;
  ceil->add_option("--bold-dir", ceil_dir, "directory of .bold runs")->required();
  ceil->add_option("--out", ceil_out, "output prefix")->required();
  ceil_cfg.attach(ceil);

  // diff
  auto* diff = app.add_subcommand("diff", "memory or tuning score between two maps");
  std::string map_a, map_b, diff_out, mode = "memory";
  std::optional<double> eps;
  diff->add_option("map_a", map_a, "augmented or fine-tuned score CSV")->required()->check(CLI::ExistingFile);
  diff->add_option("map_b", map_b, "baseline score CSV")->required()->check(CLI::ExistingFile);
  diff->add_option("--mode", mode, "memory | tuning")->check(CLI::IsMember({"memory", "tuning"}));
  diff->add_option("--eps", eps, "tuning mask threshold on |base|");
  diff->add_option("--out", diff_out, "output prefix")->required();

  // roi
  auto* roi_cmd = app.add_subcommand("roi", "per-region table of one map, or CIs over subject maps");
  std::vector<std::string> roi_maps;
  std::string atlas_path, labels_path, roi_out;
  double level = 0.95;
  roi_cmd->add_option("maps", roi_maps, "score CSV(s); two or more give confidence intervals")->required();
  roi_cmd->add_option("--atlas", atlas_path, "atlas TSV")->required()->check(CLI::ExistingFile);
  roi_cmd->add_option("--labels", labels_path, "one label per line (default: the nine study regions)")
      ->check(CLI::ExistingFile);
  roi_cmd->add_option("--level", level, "confidence level")->check(CLI::Range(0.5, 0.9999));
  roi_cmd->add_option("--out", roi_out, "output CSV")->required();

  // layers
  auto* layers = app.add_subcommand("layers", "brain score of every layer, per hemisphere");
  ConfigArgs layers_cfg;
  std::vector<std::string> layer_files;
  std::string layers_transcript, layers_bold, layers_atlas, layers_out;
  layers->add_option("--transcript", layers_transcript, "transcript TSV")->required();
  layers->add_option("--features", layer_files, "FEAT files or glob pattern, one per layer")->required();
  layers->add_option("--bold-dir", layers_bold, "directory of .bold runs")->required();
  layers->add_option("--atlas", layers_atlas, "atlas TSV for the L/R split");
  layers->add_option("--out", layers_out, "output CSV")->required();
  layers_cfg.attach(layers);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset with known ground truth");
  ConfigArgs synth_cfg;
  std::string synth_dir;
  synth_cmd->add_option("--out-dir", synth_dir, "output directory")->required();
  synth_cfg.attach(synth_cmd);

  // augment
  auto* augment = app.add_subcommand("augment", "merge annotation records into a transcript");
  std::string aug_transcript, aug_annotations, aug_out;
  augment->add_option("--transcript", aug_transcript, "transcript TSV")->required();
  augment->add_option("--annotations", aug_annotations, "annotation TSV")->required();
  augment->add_option("--out", aug_out, "output transcript TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*score) {
      const auto cfg = score_cfg.run_config(true);
      const auto t = stimulus::load_transcript(transcript_path);
      const auto f = features::load_features(features_path);
      const auto runs = scoring::load_bold_dir(bold_dir);
      const auto meta = cfg.to_json();
      ensure_parent(out_prefix);
      if (per_subject) {
        const auto maps = scoring::subject_scores(f, t, runs, cfg);
        for (std::size_t i = 0; i < maps.size(); ++i)
          scoring::save_score_map(out_prefix + "_" + runs[i].subject_id, maps[i], meta);
      } else {
        const auto group = scoring::average_subjects(runs);
        scoring::save_score_map(out_prefix, scoring::brain_score(f, t, group, cfg), meta);
      }
    } else if (*ceil) {
      const auto cfg = ceil_cfg.run_config(false);
      const auto runs = scoring::load_bold_dir(ceil_dir);
      ensure_parent(ceil_out);
      scoring::save_score_map(ceil_out, scoring::ceiling(runs, cfg.ceiling_splits, cfg.seed, cfg.workers),
                              cfg.to_json());
    } else if (*diff) {
      const auto a = scoring::load_score_map(map_a);
      const auto b = scoring::load_score_map(map_b);
      nlohmann::json meta;
      meta["mode"] = mode;
      meta["map_a"] = map_a;
      meta["map_b"] = map_b;
      ensure_parent(diff_out);
      if (mode == "memory") {
        scoring::save_score_map(diff_out, scoring::memory_score(a, b), meta);
      } else {
        const double e = eps.value_or(RunConfig{}.eps);
        meta["eps"] = e;
        scoring::save_score_map(diff_out, scoring::tuning_score(a, b, e), meta);
      }
    } else if (*roi_cmd) {
      const auto atlas = roi::load_atlas(atlas_path);
      const auto labels = labels_path.empty() ? roi::study_labels() : roi::load_labels(labels_path);
      std::vector<scoring::ScoreMap> maps;
      for (const auto& p : expand_paths(roi_maps)) maps.push_back(scoring::load_score_map(p));
      const auto cells = maps.size() == 1 ? roi::roi_mean(maps.front(), atlas, labels)
                                          : roi::roi_ci(maps, atlas, labels, level);
      auto csv = open_out(roi_out);
      roi::write_roi_csv(csv, cells);
    } else if (*layers) {
      const auto cfg = layers_cfg.run_config(true);
      const auto t = stimulus::load_transcript(layers_transcript);
      std::vector<features::FeatureMatrix> feats;
      for (const auto& p : expand_paths(layer_files)) feats.push_back(features::load_features(p));
      const auto runs = scoring::load_bold_dir(layers_bold);
      const auto group = scoring::average_subjects(runs);
      std::optional<roi::Atlas> atlas;
      if (!layers_atlas.empty()) atlas = roi::load_atlas(layers_atlas);
      const auto maps = scoring::layer_sweep(feats, t, group, cfg);

      std::vector<Eigen::Index> all(static_cast<std::size_t>(group.voxels()));
      for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<Eigen::Index>(j);
      std::vector<std::pair<std::string, std::vector<Eigen::Index>>> groups;
      if (atlas) {
        std::vector<Eigen::Index> left, right;
        for (const auto& [voxel, parcel] : atlas->entries) {
          if (!parcel) continue;
          if (voxel >= all.size())
            throw InputError("atlas voxel " + std::to_string(voxel) + " is outside the BOLD data");
          (parcel->hemisphere == roi::Hemisphere::left ? left : right).push_back(static_cast<Eigen::Index>(voxel));
        }
        groups.emplace_back("L", std::move(left));
        groups.emplace_back("R", std::move(right));
      }
      groups.emplace_back("all", all);

      std::vector<std::size_t> order(maps.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](auto x, auto y) { return maps[x].layer_id < maps[y].layer_id; });
      auto csv = open_out(layers_out);
      csv << "layer_id,hemisphere,mean_score,n_voxels\n";
      for (auto i : order)
        for (const auto& [name, voxels] : groups) {
          std::size_t n = 0;
          const auto m = mean_of(maps[i], voxels, n);
          csv << maps[i].layer_id << ',' << name << ',' << format_value(m) << ',' << n << '\n';
        }
    } else if (*synth_cmd) {
      const auto kv = synth_cfg.merged();
      const auto sc = synth::apply_synth_keys(kv);
      const auto ds = synth::generate(sc);
      const fs::path dir(synth_dir);
      fs::create_directories(dir / "bold");
      stimulus::save_transcript((dir / "transcript.tsv").string(), ds.transcript);
      features::save_features((dir / "features.feat").string(), ds.features);
      for (const auto& r : ds.runs) scoring::save_bold((dir / "bold" / (r.subject_id + ".bold")).string(), r);
      {
        nlohmann::json truth;
        truth["config"] = sc.to_json();
        truth["ground_truth"] = ds.truth.to_json();
        truth["expected_score"] = synth::expected_score(sc);
        if (sc.subjects >= 2) truth["expected_ceiling"] = synth::expected_ceiling(sc);
        auto js = open_out((dir / "truth.json").string());
        js << truth.dump(2) << '\n';
      }
      {
        roi::Atlas atlas;
        const auto& labels = roi::study_labels();
        const auto half = (sc.voxels + 1) / 2;
        for (std::size_t j = 0; j < sc.voxels; ++j) {
          const auto h = j < half ? roi::Hemisphere::left : roi::Hemisphere::right;
          const auto within = j < half ? j : j - half;
          atlas.entries[j] = roi::Parcel{h, labels[within % labels.size()]};
        }
        auto a = open_out((dir / "atlas.tsv").string());
        roi::write_atlas(a, atlas);
      }
      {
        auto cfg = open_out((dir / "run.cfg").string());
        const RunConfig rc;
        cfg << "k = " << sc.k_true << '\n'
            << "penalty_grid = " << format_penalty_grid(rc.penalty_grid) << '\n'
            << "outer_folds_pooled = " << rc.outer_folds_pooled << '\n'
            << "outer_folds_subject = " << rc.outer_folds_subject << '\n'
            << "inner_folds = " << rc.inner_folds << '\n'
            << "seed = " << sc.seed << '\n';
      }
      if (sc.memory_tokens > 0) {
        for (bool informative : {true, false}) {
          const std::string tag = informative ? "informative" : "uninformative";
          const auto [t, f] = synth::generate_augmented(ds, sc.memory_tokens, informative, sc.seed + 1);
          stimulus::save_transcript((dir / ("transcript_" + tag + ".tsv")).string(), t);
          features::save_features((dir / ("features_" + tag + ".feat")).string(), f);
          auto ann = open_out((dir / ("annotations_" + tag + ".tsv")).string());
          ann << "sentence_id\tlevel\tcontent\n";
          for (const auto& r : synth::augmentation_records(ds, sc.memory_tokens, informative))
            ann << r.sentence_id << "\tword\t" << r.content << '\n';
        }
      }
    } else if (*augment) {
      const auto t = stimulus::load_transcript(aug_transcript);
      const auto records = stimulus::load_annotations(aug_annotations);
      const auto merged = stimulus::merge_augmentation(t, records);
      ensure_parent(aug_out);
      stimulus::save_transcript(aug_out, merged);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace voxenc::cli
