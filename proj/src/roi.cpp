#include "voxenc/roi.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "text_format.hpp"
#include "voxenc/errors.hpp"
#include "voxenc/stats.hpp"

namespace voxenc::roi {

namespace {

std::string cell_value(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string("nan");
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string to_string(Hemisphere h) { return h == Hemisphere::left ? "L" : "R"; }

const std::vector<std::string>& destrieux_labels() {
  static const std::vector<std::string> labels = {
      "G_and_S_frontomargin",      "G_and_S_occipital_inf",    "G_and_S_paracentral",
      "G_and_S_subcentral",        "G_and_S_transv_frontopol", "G_and_S_cingul-Ant",
      "G_and_S_cingul-Mid-Ant",    "G_and_S_cingul-Mid-Post",  "G_cingul-Post-dorsal",
      "G_cingul-Post-ventral",     "G_cuneus",                 "G_front_inf-Opercular",
      "G_front_inf-Orbital",       "G_front_inf-Triangul",     "G_front_middle",
      "G_front_sup",               "G_Ins_lg_and_S_cent_ins",  "G_insular_short",
      "G_occipital_middle",        "G_occipital_sup",          "G_oc-temp_lat-fusifor",
      "G_oc-temp_med-Lingual",     "G_oc-temp_med-Parahip",    "G_orbital",
      "G_pariet_inf-Angular",      "G_pariet_inf-Supramar",    "G_parietal_sup",
      "G_postcentral",             "G_precentral",             "G_precuneus",
      "G_rectus",                  "G_subcallosal",            "G_temp_sup-G_T_transv",
      "G_temp_sup-Lateral",        "G_temp_sup-Plan_polar",    "G_temp_sup-Plan_tempo",
      "G_temporal_inf",            "G_temporal_middle",        "Lat_Fis-ant-Horizont",
      "Lat_Fis-ant-Vertical",      "Lat_Fis-post",             "Pole_occipital",
      "Pole_temporal",             "S_calcarine",              "S_central",
      "S_cingul-Marginalis",       "S_circular_insula_ant",    "S_circular_insula_inf",
      "S_circular_insula_sup",     "S_collat_transv_ant",      "S_collat_transv_post",
      "S_front_inf",               "S_front_middle",           "S_front_sup",
      "S_interm_prim-Jensen",      "S_intrapariet_and_P_trans", "S_oc_middle_and_Lunatus",
      "S_oc_sup_and_transversal",  "S_occipital_ant",          "S_oc-temp_lat",
      "S_oc-temp_med_and_Lingual", "S_orbital_lateral",        "S_orbital_med-olfact",
      "S_orbital-H_Shaped",        "S_parieto_occipital",      "S_pericallosal",
      "S_postcentral",             "S_precentral-inf-part",    "S_precentral-sup-part",
      "S_suborbital",              "S_subparietal",            "S_temporal_inf",
      "S_temporal_sup",            "S_temporal_transverse",
  };
  return labels;
}

const std::vector<std::string>& study_labels() {
  static const std::vector<std::string> labels = {
      "S_front_inf",    "S_front_sup",      "G_front_middle",
      "G_front_sup",    "G_pariet_inf-Angular", "G_parietal_sup",
      "G_temporal_inf", "S_temporal_inf",   "G_temporal_middle",
  };
  return labels;
}

Atlas parse_atlas(std::istream& in) {
  const auto& all = destrieux_labels();
  return parse_atlas(in, std::set<std::string>(all.begin(), all.end()));
}

Atlas parse_atlas(std::istream& in, const std::set<std::string>& declared) {
  Atlas atlas;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 tab-separated fields");
    if (!header_seen) {
      header_seen = true;
      if (fields[0] == "voxel_index") {
        if (fields[1] != "hemisphere" || fields[2] != "label")
          throw ParseError(lineno, "header must be 'voxel_index hemisphere label'");
        continue;
      }
    }
    const auto index = detail::parse_uint(fields[0]);
    if (!index) throw ParseError(lineno, "bad voxel index '" + std::string(fields[0]) + "'");
    std::optional<Parcel> parcel;
    if (fields[1] == "-") {
      if (fields[2] != "-") throw ParseError(lineno, "unmapped voxel must have label '-'");
    } else {
      Parcel p;
      if (fields[1] == "L") p.hemisphere = Hemisphere::left;
      else if (fields[1] == "R") p.hemisphere = Hemisphere::right;
      else throw ParseError(lineno, "unknown hemisphere code '" + std::string(fields[1]) + "'");
      p.label = std::string(fields[2]);
      if (p.label.empty()) throw ParseError(lineno, "empty label");
      if (!declared.empty() && !declared.count(p.label))
        throw ParseError(lineno, "label '" + p.label + "' is not in the declared label set");
      parcel = std::move(p);
    }
    if (!atlas.entries.emplace(static_cast<std::size_t>(*index), std::move(parcel)).second)
      throw ParseError(lineno, "duplicate voxel index " + std::to_string(*index));
  }
  return atlas;
}

Atlas load_atlas(const std::string& path) {
  auto in = open(path);
  return parse_atlas(in);
}

Atlas load_atlas(const std::string& path, const std::set<std::string>& declared) {
  auto in = open(path);
  return parse_atlas(in, declared);
}

void write_atlas(std::ostream& out, const Atlas& a) {
  out << "voxel_index\themisphere\tlabel\n";
  for (const auto& [voxel, parcel] : a.entries) {
    if (parcel) out << voxel << '\t' << to_string(parcel->hemisphere) << '\t' << parcel->label << '\n';
    else out << voxel << "\t-\t-\n";
  }
}

std::vector<std::string> parse_labels(std::istream& in) {
  std::vector<std::string> labels;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto l = std::string(detail::trim(line));
    if (l.empty() || l.front() == '#') continue;
    if (!seen.insert(l).second) throw ParseError(lineno, "label '" + l + "' listed twice");
    labels.push_back(l);
  }
  if (labels.empty()) throw InputError("label list is empty");
  return labels;
}

std::vector<std::string> load_labels(const std::string& path) {
  auto in = open(path);
  return parse_labels(in);
}

std::vector<Cell> roi_mean(const scoring::ScoreMap& s, const Atlas& a,
                           std::span<const std::string> labels) {
  if (!a.entries.empty() && a.entries.rbegin()->first >= static_cast<std::size_t>(s.voxels()))
    throw InputError("atlas voxel " + std::to_string(a.entries.rbegin()->first) +
                     " is outside the score map (" + std::to_string(s.voxels()) + " voxels)");
  std::map<std::pair<std::string, Hemisphere>, std::pair<double, std::size_t>> acc;
  for (const auto& [voxel, parcel] : a.entries) {
    if (!parcel) continue;
    const auto v = s.at(static_cast<Eigen::Index>(voxel));
    if (!v) continue;
    auto& [sum, n] = acc[{parcel->label, parcel->hemisphere}];
    sum += *v;
    ++n;
  }
  std::vector<Cell> cells;
  cells.reserve(labels.size() * 2);
  for (const auto& label : labels) {
    for (auto h : {Hemisphere::left, Hemisphere::right}) {
      Cell c;
      c.label = label;
      c.hemisphere = h;
      if (auto it = acc.find({label, h}); it != acc.end()) {
        c.mean = it->second.first / static_cast<double>(it->second.second);
        c.n_voxels = it->second.second;
        c.n_subjects = 1;
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<Cell> roi_ci(std::span<const scoring::ScoreMap> maps, const Atlas& a,
                         std::span<const std::string> labels, double level) {
  if (maps.size() < 2) throw InputError("confidence intervals need at least 2 subjects");
  for (const auto& m : maps)
    if (m.voxels() != maps.front().voxels())
      throw InputError("subject score maps differ in voxel count");
  std::vector<std::vector<Cell>> per_subject;
  per_subject.reserve(maps.size());
  for (const auto& m : maps) per_subject.push_back(roi_mean(m, a, labels));

  std::vector<Cell> cells = per_subject.front();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> means;
    std::size_t voxels = 0;
    for (const auto& subject : per_subject) {
      if (!subject[c].mean) continue;
      means.push_back(*subject[c].mean);
      voxels = std::max(voxels, subject[c].n_voxels);
    }
    auto& cell = cells[c];
    cell.n_subjects = means.size();
    cell.n_voxels = voxels;
    cell.mean.reset();
    cell.ci_low.reset();
    cell.ci_high.reset();
    if (means.size() >= 2) {
      const auto iv = stats::student_t_interval(means, level);
      cell.mean = iv.mean;
      cell.ci_low = iv.low;
      cell.ci_high = iv.high;
    } else if (means.size() == 1) {
      cell.mean = means.front();
    }
  }
  return cells;
}

void write_roi_csv(std::ostream& out, std::span<const Cell> cells) {
  out << "label,hemisphere,mean,ci_low,ci_high,n_voxels,n_subjects\n";
  for (const auto& c : cells)
    out << c.label << ',' << to_string(c.hemisphere) << ',' << cell_value(c.mean) << ','
        << cell_value(c.ci_low) << ',' << cell_value(c.ci_high) << ',' << c.n_voxels << ','
        << c.n_subjects << '\n';
}

}  // namespace voxenc::roi
