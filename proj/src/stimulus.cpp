#include "voxenc/stimulus.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "text_format.hpp"
#include "voxenc/errors.hpp"

namespace voxenc::stimulus {

namespace {

constexpr std::string_view kTranscriptHeader[] = {"word", "onset", "offset", "sentence_id"};
constexpr std::string_view kAnnotationHeader[] = {"sentence_id", "level", "content"};

template <std::size_t N>
bool is_header(const std::vector<std::string_view>& fields, const std::string_view (&header)[N]) {
  if (fields.size() != N) return false;
  for (std::size_t i = 0; i < N; ++i)
    if (detail::trim(fields[i]) != header[i]) return false;
  return true;
}

bool has_control_separator(const std::string& s) {
  return s.find_first_of("\t\r\n") != std::string::npos;
}

}  // namespace

std::vector<double> Transcript::onsets() const {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& w : tokens) out.push_back(w.onset);
  return out;
}

void validate(const Transcript& t) {
  if (t.tokens.empty()) throw InputError("transcript has no tokens");
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    const auto& w = t.tokens[i];
    const auto where = "token " + std::to_string(i) + " ('" + w.text + "')";
    if (w.text.empty()) throw InputError(where + ": empty word");
    if (!std::isfinite(w.onset) || !std::isfinite(w.offset))
      throw InputError(where + ": non-finite timing");
    if (w.onset > w.offset) throw InputError(where + ": onset after offset");
    if (i > 0) {
      const auto& prev = t.tokens[i - 1];
      if (w.onset < prev.onset) throw InputError(where + ": onset decreases");
      if (w.sentence_id < prev.sentence_id) throw InputError(where + ": sentence_id decreases");
    }
  }
}

Transcript parse_transcript(std::istream& in, std::string story_id) {
  Transcript t;
  t.story_id = std::move(story_id);
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (!seen_content) {
      seen_content = true;
      if (is_header(fields, kTranscriptHeader)) continue;
    }
    if (fields.size() != 4)
      throw ParseError(lineno, "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    WordToken w;
    w.text = std::string(fields[0]);
    if (detail::trim(w.text).empty()) throw ParseError(lineno, "empty word");
    const auto onset = detail::parse_double(fields[1]);
    const auto offset = detail::parse_double(fields[2]);
    const auto sid = detail::parse_uint(fields[3]);
    if (!onset || !std::isfinite(*onset)) throw ParseError(lineno, "bad onset '" + std::string(fields[1]) + "'");
    if (!offset || !std::isfinite(*offset)) throw ParseError(lineno, "bad offset '" + std::string(fields[2]) + "'");
    if (!sid) throw ParseError(lineno, "bad sentence_id '" + std::string(fields[3]) + "'");
    w.onset = *onset;
    w.offset = *offset;
    w.sentence_id = *sid;
    if (w.onset > w.offset) throw ParseError(lineno, "onset after offset");
    if (!t.tokens.empty()) {
      if (w.onset < t.tokens.back().onset) throw ParseError(lineno, "onset decreases");
      if (w.sentence_id < t.tokens.back().sentence_id) throw ParseError(lineno, "sentence_id decreases");
    }
    t.tokens.push_back(std::move(w));
  }
  if (t.tokens.empty()) throw InputError("transcript has no tokens");
  return t;
}

Transcript load_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  auto stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_transcript(in, stem);
}

void write_transcript(std::ostream& out, const Transcript& t) {
  validate(t);
  out << "word\tonset\toffset\tsentence_id\n";
  for (const auto& w : t.tokens) {
    if (has_control_separator(w.text)) throw InputError("word contains a tab or newline: '" + w.text + "'");
    out << w.text << '\t' << detail::format_fixed(w.onset, 3) << '\t'
        << detail::format_fixed(w.offset, 3) << '\t' << w.sentence_id << '\n';
  }
}

void save_transcript(const std::string& path, const Transcript& t) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  write_transcript(out, t);
}

SentenceSpans sentence_spans(const Transcript& t) {
  SentenceSpans spans;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    auto [it, inserted] = spans.try_emplace(t.tokens[i].sentence_id, i, i);
    if (!inserted) it->second.second = i;
  }
  return spans;
}

std::vector<AugmentationRecord> parse_annotations(std::istream& in) {
  std::vector<AugmentationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (!seen_content) {
      seen_content = true;
      if (is_header(fields, kAnnotationHeader)) continue;
    }
    if (fields.size() != 3)
      throw ParseError(lineno, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    AugmentationRecord r;
    const auto sid = detail::parse_uint(fields[0]);
    if (!sid) throw ParseError(lineno, "bad sentence_id '" + std::string(fields[0]) + "'");
    r.sentence_id = *sid;
    const auto level = detail::trim(fields[1]);
    if (level == "word") {
      r.level = AugmentationLevel::word;
    } else if (level == "sentence") {
      r.level = AugmentationLevel::sentence;
    } else {
      throw ParseError(lineno, "unknown level '" + std::string(level) + "'");
    }
    r.content = std::string(detail::trim(fields[2]));
    if (r.content.empty()) throw ParseError(lineno, "empty content");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AugmentationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_annotations(in);
}

std::vector<std::string> tokenize_content(const std::string& content) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : content) {
    const bool sep = c == ',' || c == '.' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                     c == '\f' || c == '\v';
    if (sep) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

Transcript merge_augmentation(const Transcript& t, std::span<const AugmentationRecord> records) {
  const auto spans = sentence_spans(t);
  // last original token index -> words to insert after it, in record order
  std::map<std::size_t, std::vector<std::string>> inserts;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto span = spans.find(rec.sentence_id);
    if (span == spans.end())
      throw InputError("annotation " + std::to_string(r) + ": unknown sentence_id " +
                       std::to_string(rec.sentence_id));
    auto words = tokenize_content(rec.content);
    if (words.empty())
      throw InputError("annotation " + std::to_string(r) + ": content has no words");
    auto& dst = inserts[span->second.second];
    dst.insert(dst.end(), std::make_move_iterator(words.begin()), std::make_move_iterator(words.end()));
  }

  Transcript out;
  out.story_id = t.story_id;
  std::size_t total = t.tokens.size();
  for (const auto& [_, words] : inserts) total += words.size();
  out.tokens.reserve(total);
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    const auto& w = t.tokens[i];
    out.tokens.push_back(w);
    auto it = inserts.find(i);
    if (it == inserts.end()) continue;
    for (const auto& word : it->second)
      out.tokens.push_back(WordToken{word, w.offset, w.offset, w.sentence_id});
    if (i + 1 < t.tokens.size() && t.tokens[i + 1].onset < w.offset)
      throw InputError("cannot insert after token " + std::to_string(i) +
                       ": next word starts before this word's offset");
  }
  return out;
}

}  // namespace voxenc::stimulus
