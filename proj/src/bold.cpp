#include "voxenc/bold.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>

#include "binary_io.hpp"
#include "voxenc/errors.hpp"

namespace voxenc::scoring {

namespace {

constexpr char kMagic[4] = {'B', 'O', 'L', 'D'};

BoldRun decode_bold(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || r.fixed(4, "magic") != std::string(kMagic, 4))
    throw FormatError(FormatError::Reason::bad_magic, "not a BOLD file (bad magic)");
  const auto version = r.u32("version");
  if (version != kBoldVersion)
    throw FormatError(FormatError::Reason::bad_version,
                      "unsupported BOLD version " + std::to_string(version));
  const auto frames = r.u64("frame count");
  const auto voxels = r.u64("voxel count");
  BoldRun run;
  run.timeline.tr = r.f64("tr");
  run.timeline.t0 = r.f64("t0");
  run.subject_id = r.short_string("subject_id");
  run.story_id = r.short_string("story_id");
  if (frames == 0 || voxels == 0)
    throw FormatError(FormatError::Reason::invalid_header, "BOLD header has an empty shape");
  if (!(run.timeline.tr > 0.0) || !std::isfinite(run.timeline.tr) || !std::isfinite(run.timeline.t0))
    throw FormatError(FormatError::Reason::invalid_header, "BOLD header has an invalid timeline");
  if (frames > std::numeric_limits<std::uint64_t>::max() / voxels / 4 ||
      frames * voxels * 4 > r.remaining())
    throw FormatError(FormatError::Reason::truncated, "BOLD payload is truncated");
  if (frames * voxels * 4 < r.remaining())
    throw FormatError(FormatError::Reason::trailing_bytes, "unexpected bytes after BOLD payload");
  run.timeline.frames = frames;
  // payload is row-major (frame-major); Eigen storage is column-major
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(voxels));
  detail::read_f32_payload(r, frames * voxels, rows.data());
  run.values = rows;
  return run;
}

}  // namespace

void BoldRun::validate() const {
  timeline.validate();
  if (values.rows() != static_cast<Eigen::Index>(timeline.frames))
    throw InputError("BOLD run has " + std::to_string(values.rows()) + " rows but timeline has " +
                     std::to_string(timeline.frames) + " frames");
  if (values.cols() == 0) throw InputError("BOLD run has no voxels");
  if (!values.allFinite()) throw InputError("BOLD run contains non-finite values");
}

std::vector<char> encode_bold(const BoldRun& run) {
  run.validate();
  detail::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kBoldVersion);
  w.u64(static_cast<std::uint64_t>(run.frames()));
  w.u64(static_cast<std::uint64_t>(run.voxels()));
  w.f64(run.timeline.tr);
  w.f64(run.timeline.t0);
  w.short_string(run.subject_id);
  w.short_string(run.story_id);
  for (Eigen::Index i = 0; i < run.frames(); ++i)
    for (Eigen::Index j = 0; j < run.voxels(); ++j) {
      const auto v = static_cast<float>(run.values(i, j));
      if (!std::isfinite(v)) throw InputError("BOLD value overflows float32 at frame " + std::to_string(i));
      w.f32(v);
    }
  return std::move(w.buffer());
}

BoldRun read_bold(std::istream& in) { return decode_bold(detail::read_all(in)); }

BoldRun load_bold(const std::string& path) { return decode_bold(detail::read_file(path)); }

void write_bold(std::ostream& out, const BoldRun& run) {
  const auto bytes = encode_bold(run);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_bold(const std::string& path, const BoldRun& run) { detail::write_file(path, encode_bold(run)); }

std::vector<BoldRun> load_bold_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InputError("not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".bold") paths.push_back(entry.path());
  if (paths.empty()) throw InputError("no .bold files in " + dir);
  std::sort(paths.begin(), paths.end());
  std::vector<BoldRun> runs;
  runs.reserve(paths.size());
  for (const auto& p : paths) {
    runs.push_back(load_bold(p.string()));
    const auto& first = runs.front();
    const auto& cur = runs.back();
    if (cur.frames() != first.frames() || cur.voxels() != first.voxels() ||
        !(cur.timeline == first.timeline))
      throw InputError(p.string() + ": shape or timeline differs from " + paths.front().string());
  }
  return runs;
}

}  // namespace voxenc::scoring
