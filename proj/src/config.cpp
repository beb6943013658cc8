#include "voxenc/config.hpp"

#include <fstream>
#include <istream>
#include <set>

#include "text_format.hpp"
#include "voxenc/errors.hpp"

namespace voxenc {

namespace {

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys = {
      "k", "penalty_grid", "outer_folds_pooled", "outer_folds_subject", "inner_folds",
      "eps", "n_ceiling_splits", "seed", "workers"};
  return keys;
}

const std::set<std::string>& synth_keys() {
  static const std::set<std::string> keys = {
      "words", "dims", "frames", "tr", "t0", "voxels", "subjects", "k_true", "signal_scale",
      "subject_noise", "shared_noise", "sentence_length", "memory_tokens", "layer_id", "seed"};
  return keys;
}

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

}  // namespace

bool is_run_key(const std::string& key) { return run_keys().count(key) > 0; }
bool is_synth_key(const std::string& key) { return synth_keys().count(key) > 0; }

void RunConfig::validate() const {
  if (lags == 0) throw InputError("k must be at least 1");
  penalty_grid.validate();
  if (outer_folds_pooled < 2 || outer_folds_subject < 2 || inner_folds < 2)
    throw InputError("fold counts must be at least 2");
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (ceiling_splits == 0) throw InputError("n_ceiling_splits must be at least 1");
  if (workers < 0) throw InputError("workers must be non-negative");
}

ridge::RidgeOptions RunConfig::ridge_options() const {
  ridge::RidgeOptions o;
  o.grid = penalty_grid;
  o.inner_folds = inner_folds;
  o.backend = backend;
  o.workers = workers;
  return o;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["k"] = lags;
  j["penalty_grid"] = penalty_grid.values;
  j["outer_folds_pooled"] = outer_folds_pooled;
  j["outer_folds_subject"] = outer_folds_subject;
  j["inner_folds"] = inner_folds;
  j["eps"] = eps;
  j["n_ceiling_splits"] = ceiling_splits;
  j["seed"] = seed;
  return j;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
    const auto key = std::string(detail::trim(body.substr(0, eq)));
    const auto value = std::string(detail::trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (!is_run_key(key) && !is_synth_key(key)) throw ParseError(lineno, "unknown key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_key_values(in);
}

ridge::PenaltyGrid parse_penalty_grid(const std::string& text) {
  const auto s = detail::trim(text);
  ridge::PenaltyGrid g;
  if (s.starts_with("logspace(") && s.ends_with(")")) {
    const auto args = detail::split(s.substr(9, s.size() - 10), ',');
    const auto lo = args.size() == 3 ? detail::parse_double(args[0]) : std::nullopt;
    const auto hi = args.size() == 3 ? detail::parse_double(args[1]) : std::nullopt;
    const auto n = args.size() == 3 ? detail::parse_uint(args[2]) : std::nullopt;
    if (!lo || !hi || !n) throw InputError("bad penalty_grid '" + std::string(s) + "'");
    return ridge::PenaltyGrid::logspace(*lo, *hi, static_cast<std::size_t>(*n));
  }
  for (auto part : detail::split(s, ',')) {
    const auto v = detail::parse_double(part);
    if (!v) throw InputError("bad penalty_grid value '" + std::string(part) + "'");
    g.values.push_back(*v);
  }
  g.validate();
  return g;
}

std::string format_penalty_grid(const ridge::PenaltyGrid& g) {
  std::string out;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (i) out += ',';
    out += detail::format_double(g.values[i]);
  }
  return out;
}

RunConfig apply_run_keys(const KeyValues& kv, RunConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "k") base.lags = as_count(key, value);
    else if (key == "penalty_grid") base.penalty_grid = parse_penalty_grid(value);
    else if (key == "outer_folds_pooled") base.outer_folds_pooled = as_count(key, value);
    else if (key == "outer_folds_subject") base.outer_folds_subject = as_count(key, value);
    else if (key == "inner_folds") base.inner_folds = as_count(key, value);
    else if (key == "eps") base.eps = as_real(key, value);
    else if (key == "n_ceiling_splits") base.ceiling_splits = as_count(key, value);
    else if (key == "seed") base.seed = as_count(key, value);
    else if (key == "workers") base.workers = static_cast<int>(as_count(key, value));
    else if (!is_synth_key(key)) throw InputError("unknown config key '" + key + "'");
  }
  base.validate();
  return base;
}

}  // namespace voxenc
