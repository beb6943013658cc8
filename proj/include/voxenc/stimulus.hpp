#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace voxenc::stimulus {

struct WordToken {
  std::string text;
  double onset = 0.0;   // seconds from stimulus start
  double offset = 0.0;  // seconds from stimulus start
  std::uint64_t sentence_id = 0;

  bool operator==(const WordToken&) const = default;
};

/// Time-stamped word sequence of one story. Onsets and sentence ids are
/// nondecreasing and there is at least one token.
struct Transcript {
  std::string story_id;
  std::vector<WordToken> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  std::vector<double> onsets() const;

  bool operator==(const Transcript&) const = default;
};

enum class AugmentationLevel { word, sentence };

struct AugmentationRecord {
  std::uint64_t sentence_id = 0;
  AugmentationLevel level = AugmentationLevel::word;
  std::string content;
};

/// Inclusive token index range of each sentence.
using SentenceSpans = std::map<std::uint64_t, std::pair<std::size_t, std::size_t>>;

/// Checks every Transcript invariant; throws InputError naming the first
/// offending token.
void validate(const Transcript& t);

/// Reads the TSV transcript format (`word onset offset sentence_id`). The
/// header line is optional. Errors carry the physical line number.
Transcript parse_transcript(std::istream& in, std::string story_id = {});
Transcript load_transcript(const std::string& path);

/// Writes the TSV format with a header. Times use the shortest decimal that
/// round-trips, padded to at least three decimals, so parse(write(t)) == t.
void write_transcript(std::ostream& out, const Transcript& t);
void save_transcript(const std::string& path, const Transcript& t);

SentenceSpans sentence_spans(const Transcript& t);

/// Reads the TSV annotation format (`sentence_id level content`).
std::vector<AugmentationRecord> parse_annotations(std::istream& in);
std::vector<AugmentationRecord> load_annotations(const std::string& path);

/// Splits annotation content into inserted words. Commas and periods act as
/// separators alongside whitespace.
std::vector<std::string> tokenize_content(const std::string& content);

/// Inserts each record's words right after the last original token of its
/// sentence. Inserted tokens are zero-duration, timed at that token's
/// offset. Several records for one sentence are appended in record order.
Transcript merge_augmentation(const Transcript& t,
                              std::span<const AugmentationRecord> records);

}  // namespace voxenc::stimulus
