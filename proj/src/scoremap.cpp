#include "voxenc/scoremap.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "text_format.hpp"
#include "voxenc/errors.hpp"

namespace voxenc::scoring {

std::string to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::brain: return "brain";
    case ScoreKind::ceiling: return "ceiling";
    case ScoreKind::memory: return "memory";
    case ScoreKind::tuning: return "tuning";
  }
  return "brain";
}

ScoreKind score_kind_from_string(const std::string& s) {
  if (s == "brain") return ScoreKind::brain;
  if (s == "ceiling") return ScoreKind::ceiling;
  if (s == "memory") return ScoreKind::memory;
  if (s == "tuning") return ScoreKind::tuning;
  throw InputError("unknown score kind '" + s + "'");
}

std::optional<double> ScoreMap::at(Eigen::Index j) const {
  if (!defined[static_cast<std::size_t>(j)]) return std::nullopt;
  return values(j);
}

std::size_t ScoreMap::defined_count() const {
  std::size_t n = 0;
  for (bool d : defined) n += d ? 1 : 0;
  return n;
}

std::optional<double> ScoreMap::mean() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < voxels(); ++j) {
    if (!defined[static_cast<std::size_t>(j)]) continue;
    sum += values(j);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

void ScoreMap::validate() const {
  if (defined.size() != static_cast<std::size_t>(values.size()))
    throw InputError("score map mask length differs from value count");
  const bool bounded = kind == ScoreKind::brain || kind == ScoreKind::ceiling;
  for (Eigen::Index j = 0; j < voxels(); ++j) {
    if (!defined[static_cast<std::size_t>(j)]) continue;
    if (!std::isfinite(values(j))) throw InputError("score map has a non-finite defined entry");
    if (bounded && (values(j) < -1.0 || values(j) > 1.0))
      throw InputError("correlation score outside [-1, 1] at voxel " + std::to_string(j));
  }
}

ScoreMap make_score_map(ScoreKind kind, const Eigen::VectorXd& values_with_nan) {
  ScoreMap m;
  m.kind = kind;
  m.values = values_with_nan;
  m.defined.resize(static_cast<std::size_t>(values_with_nan.size()));
  for (Eigen::Index j = 0; j < values_with_nan.size(); ++j) {
    const bool ok = std::isfinite(values_with_nan(j));
    m.defined[static_cast<std::size_t>(j)] = ok;
    if (!ok) m.values(j) = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

void write_score_csv(std::ostream& out, const ScoreMap& m) {
  m.validate();
  out << "voxel_index,score,defined\n";
  for (Eigen::Index j = 0; j < m.voxels(); ++j) {
    const bool d = m.defined[static_cast<std::size_t>(j)];
    out << j << ',' << (d ? detail::format_double(m.values(j)) : std::string("nan")) << ','
        << (d ? 1 : 0) << '\n';
  }
}

ScoreMap read_score_csv(std::istream& in, ScoreKind kind) {
  ScoreMap m;
  m.kind = kind;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (!header_seen) {
      if (detail::trim(line) != "voxel_index,score,defined")
        throw ParseError(lineno, "expected header 'voxel_index,score,defined'");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 comma-separated fields");
    const auto index = detail::parse_uint(fields[0]);
    if (!index || *index != values.size())
      throw ParseError(lineno, "voxel_index must count up from 0");
    const auto flag = detail::trim(fields[2]);
    if (flag != "0" && flag != "1") throw ParseError(lineno, "defined must be 0 or 1");
    if (flag == "1") {
      const auto v = detail::parse_double(fields[1]);
      if (!v || !std::isfinite(*v)) throw ParseError(lineno, "bad score '" + std::string(fields[1]) + "'");
      values.push_back(*v);
      m.defined.push_back(true);
    } else {
      values.push_back(std::numeric_limits<double>::quiet_NaN());
      m.defined.push_back(false);
    }
  }
  if (!header_seen) throw InputError("score CSV is empty");
  m.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  m.validate();
  return m;
}

nlohmann::json sidecar(const ScoreMap& m, const nlohmann::json& config) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["model_tag"] = m.model_tag;
  j["layer_id"] = m.layer_id;
  j["story_id"] = m.story_id;
  j["voxels"] = m.voxels();
  j["defined_voxels"] = m.defined_count();
  const auto mean = m.mean();
  j["mean_score"] = mean ? nlohmann::json(*mean) : nlohmann::json(nullptr);
  j["config"] = config;
  return j;
}

void save_score_map(const std::string& prefix, const ScoreMap& m, const nlohmann::json& config) {
  {
    std::ofstream csv(prefix + ".csv", std::ios::trunc);
    if (!csv) throw InputError("cannot write " + prefix + ".csv");
    write_score_csv(csv, m);
  }
  std::ofstream js(prefix + ".json", std::ios::trunc);
  if (!js) throw InputError("cannot write " + prefix + ".json");
  js << sidecar(m, config).dump(2) << '\n';
}

ScoreMap load_score_map(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw InputError("cannot open " + csv_path);
  std::filesystem::path side(csv_path);
  side.replace_extension(".json");
  ScoreKind kind = ScoreKind::brain;
  nlohmann::json meta;
  if (std::filesystem::exists(side)) {
    std::ifstream js(side);
    try {
      meta = nlohmann::json::parse(js);
      kind = score_kind_from_string(meta.value("kind", std::string("brain")));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(side.string() + ": " + e.what());
    }
  }
  auto m = read_score_csv(in, kind);
  if (!meta.is_null()) {
    m.model_tag = meta.value("model_tag", std::string());
    m.layer_id = meta.value("layer_id", 0);
    m.story_id = meta.value("story_id", std::string());
  }
  return m;
}

}  // namespace voxenc::scoring
