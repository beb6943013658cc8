#include "voxenc/features.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "binary_io.hpp"
#include "voxenc/errors.hpp"

namespace voxenc::features {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};

void check_writable(const FeatureMatrix& f) {
  if (f.rows() == 0) throw InputError("feature matrix has no rows");
  if (f.dims() == 0) throw InputError("feature matrix has zero dimensions");
  if (!f.values.allFinite()) throw InputError("feature matrix contains non-finite values");
}

}  // namespace

std::vector<char> encode_features(const FeatureMatrix& f) {
  check_writable(f);
  detail::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kFeatVersion);
  w.u64(static_cast<std::uint64_t>(f.rows()));
  w.u64(static_cast<std::uint64_t>(f.dims()));
  w.i32(f.layer_id);
  w.i32(f.context_length);
  w.short_string(f.model_tag);
  w.buffer().reserve(w.buffer().size() + static_cast<std::size_t>(f.values.size()) * 4);
  const float* data = f.values.data();  // row-major
  for (Eigen::Index i = 0; i < f.values.size(); ++i) w.f32(data[i]);
  return std::move(w.buffer());
}

void write_features(std::ostream& out, const FeatureMatrix& f) {
  const auto bytes = encode_features(f);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_features(const std::string& path, const FeatureMatrix& f) {
  detail::write_file(path, encode_features(f));
}

namespace {

FeatureMatrix decode_features(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || r.fixed(4, "magic") != std::string(kMagic, 4))
    throw FormatError(FormatError::Reason::bad_magic, "not a FEAT file (bad magic)");
  const auto version = r.u32("version");
  if (version != kFeatVersion)
    throw FormatError(FormatError::Reason::bad_version,
                      "unsupported FEAT version " + std::to_string(version));
  const auto rows = r.u64("row count");
  const auto dims = r.u64("dimension count");
  FeatureMatrix f;
  f.layer_id = r.i32("layer_id");
  f.context_length = r.i32("context_length");
  f.model_tag = r.short_string("model_tag");
  if (rows == 0 || dims == 0)
    throw FormatError(FormatError::Reason::invalid_header, "FEAT header has an empty shape");
  if (rows > std::numeric_limits<std::uint64_t>::max() / dims / 4 ||
      rows * dims * 4 > r.remaining())
    throw FormatError(FormatError::Reason::truncated,
                      "FEAT payload shorter than " + std::to_string(rows) + "x" +
                          std::to_string(dims) + " float32 values");
  if (rows * dims * 4 < r.remaining())
    throw FormatError(FormatError::Reason::trailing_bytes, "unexpected bytes after FEAT payload");
  f.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
  detail::read_f32_payload(r, rows * dims, f.values.data());
  return f;
}

}  // namespace

FeatureMatrix read_features(std::istream& in) {
  const auto bytes = detail::read_all(in);
  return decode_features(bytes);
}

FeatureMatrix load_features(const std::string& path) {
  const auto bytes = detail::read_file(path);
  return decode_features(bytes);
}

void validate_pair(const FeatureMatrix& f, const stimulus::Transcript& t) {
  if (static_cast<std::size_t>(f.rows()) != t.size())
    throw InputError("feature rows (" + std::to_string(f.rows()) + ") != transcript tokens (" +
                     std::to_string(t.size()) + ")");
}

}  // namespace voxenc::features
