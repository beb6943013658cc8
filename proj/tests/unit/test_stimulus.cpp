#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "voxenc/errors.hpp"
#include "voxenc/stimulus.hpp"

using namespace voxenc;
using namespace voxenc::stimulus;

namespace {

Transcript parse(const std::string& text) {
  std::istringstream in(text);
  return parse_transcript(in, "story");
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

Transcript random_transcript(std::mt19937_64& rng, std::size_t words, std::size_t sentences) {
  std::uniform_real_distribution<double> gap(0.0, 0.7);
  std::uniform_real_distribution<double> dur(0.0, 0.5);
  Transcript t;
  t.story_id = "rand";
  double onset = 0.0;
  for (std::size_t i = 0; i < words; ++i) {
    onset += gap(rng);
    const double offset = onset + dur(rng);
    t.tokens.push_back({"w" + std::to_string(i), onset, offset, i * sentences / words});
    onset = offset;
  }
  return t;
}

}  // namespace

TEST_SUITE("stimulus") {

TEST_CASE("single row transcript") {
  const auto t = parse("hello\t0.0\t0.4\t0\n");
  CHECK(t.size() == 1);
  CHECK(t.tokens[0].text == "hello");
  CHECK(t.tokens[0].offset == 0.4);
}

TEST_CASE("header is optional and blank lines are skipped") {
  const auto a = parse("word\tonset\toffset\tsentence_id\nhi\t0.100\t0.200\t0\n\nyou\t0.300\t0.400\t0\n");
  const auto b = parse("hi\t0.1\t0.2\t0\nyou\t0.3\t0.4\t0\n");
  CHECK(a == b);
}

TEST_CASE("parse errors carry the physical line") {
  CHECK(error_line("a\t0.5\t0.6\t0\nb\t0.3\t0.4\t0\n") == 2);
  CHECK(error_line("word\tonset\toffset\tsentence_id\na\t0.1\t0.2\t1\nb\t0.3\t0.4\t0\n") == 3);
  CHECK(error_line("a\t0.1\t0.2\n") == 1);
  CHECK(error_line("a\t0.1\tx\t0\n") == 1);
  CHECK(error_line("a\t0.5\t0.2\t0\n") == 1);
  CHECK(error_line("a\t0.1\t0.2\t-1\n") == 1);
  CHECK_THROWS_AS(parse(""), InputError);
}

TEST_CASE("sentence spans") {
  const auto t = parse("a\t0.0\t0.1\t0\nb\t0.2\t0.3\t0\nc\t0.4\t0.5\t1\n");
  CHECK(t.size() == 3);
  // independent scan: first/last index per id
  std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> expect;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto id = t.tokens[i].sentence_id;
    if (!expect.count(id)) expect[id] = {i, i};
    expect[id].second = i;
  }
  CHECK(sentence_spans(t) == expect);
  CHECK(sentence_spans(t) == SentenceSpans{{0, {0, 1}}, {1, {2, 2}}});

  Transcript one;
  for (int i = 0; i < 4; ++i) one.tokens.push_back({"x", 0.1 * i, 0.1 * i, 0});
  CHECK(sentence_spans(one) == SentenceSpans{{0, {0, 3}}});

  Transcript two;
  for (int i = 0; i < 5; ++i) two.tokens.push_back({"x", 0.1 * i, 0.1 * i, i < 2 ? 0u : 1u});
  CHECK(sentence_spans(two) == SentenceSpans{{0, {0, 1}}, {1, {2, 4}}});
}

TEST_CASE("spans partition the token range") {
  std::mt19937_64 rng(3);
  const auto t = random_transcript(rng, 57, 9);
  std::vector<int> owner(t.size(), 0);
  for (const auto& [id, span] : sentence_spans(t))
    for (auto i = span.first; i <= span.second; ++i) {
      ++owner[i];
      CHECK(t.tokens[i].sentence_id == id);
    }
  CHECK(std::all_of(owner.begin(), owner.end(), [](int n) { return n == 1; }));
}

TEST_CASE("merge with no records is the identity") {
  std::mt19937_64 rng(1);
  const auto t = random_transcript(rng, 20, 4);
  CHECK(merge_augmentation(t, {}) == t);
}

TEST_CASE("merge places zero-duration tokens after the sentence") {
  const auto t = parse("a\t0.2\t0.6\t0\nb\t0.7\t1.0\t0\nc\t1.5\t1.8\t1\n");
  const std::vector<AugmentationRecord> recs{{0, AugmentationLevel::word, "heat, cozy"}};
  const auto m = merge_augmentation(t, recs);
  REQUIRE(m.size() == 5);
  CHECK(m.tokens[2] == WordToken{"heat", 1.0, 1.0, 0});
  CHECK(m.tokens[3] == WordToken{"cozy", 1.0, 1.0, 0});
  CHECK(m.tokens[4] == t.tokens[2]);
  validate(m);
}

TEST_CASE("word-level content list") {
  const auto t = parse("we\t0.0\t0.3\t0\nate\t0.4\t0.9\t0\n");
  const std::vector<AugmentationRecord> recs{
      {0, AugmentationLevel::word, "heat, bustling, cozy, spicy, casual, colorful"}};
  const auto m = merge_augmentation(t, recs);
  REQUIRE(m.size() == 8);
  for (std::size_t i = 2; i < 8; ++i) {
    CHECK(m.tokens[i].onset == 0.9);
    CHECK(m.tokens[i].offset == 0.9);
  }
  CHECK(m.tokens[7].text == "colorful");
}

TEST_CASE("tokenize content") {
  CHECK(tokenize_content("a, b.c  d") == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(tokenize_content(" ,. ").empty());
}

TEST_CASE("merge errors") {
  const auto t = parse("a\t0.0\t0.3\t0\nb\t0.4\t0.9\t1\n");
  const std::vector<AugmentationRecord> unknown{{7, AugmentationLevel::word, "x"}};
  const std::vector<AugmentationRecord> empty{{0, AugmentationLevel::word, ", ."}};
  CHECK_THROWS_AS(merge_augmentation(t, unknown), InputError);
  CHECK_THROWS_AS(merge_augmentation(t, empty), InputError);
  const auto overlap = parse("a\t0.0\t0.5\t0\nb\t0.4\t0.9\t1\n");
  const std::vector<AugmentationRecord> first{{0, AugmentationLevel::word, "x"}};
  CHECK_THROWS_AS(merge_augmentation(overlap, first), InputError);
}

TEST_CASE("records for one sentence keep record order") {
  const auto t = parse("a\t0.0\t0.3\t0\nb\t0.4\t0.9\t1\n");
  const std::vector<AugmentationRecord> recs{{0, AugmentationLevel::word, "x y"},
                                             {1, AugmentationLevel::sentence, "z"},
                                             {0, AugmentationLevel::sentence, "w"}};
  const auto m = merge_augmentation(t, recs);
  std::vector<std::string> words;
  for (const auto& w : m.tokens) words.push_back(w.text);
  CHECK(words == std::vector<std::string>{"a", "x", "y", "w", "b", "z"});
}

TEST_CASE("merge properties on random transcripts") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    const auto t = random_transcript(rng, 30, 6);
    std::vector<AugmentationRecord> recs;
    std::size_t inserted = 0;
    for (std::uint64_t s = 0; s < 6; ++s) {
      if (rng() % 2) continue;
      const std::size_t n = 1 + rng() % 3;
      std::string content;
      for (std::size_t j = 0; j < n; ++j) content += "m" + std::to_string(s) + "_" + std::to_string(j) + ", ";
      recs.push_back({s, AugmentationLevel::word, content});
      inserted += n;
    }
    const auto m = merge_augmentation(t, recs);
    CHECK(m.size() == t.size() + inserted);
    validate(m);
    auto reversed = recs;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(merge_augmentation(t, reversed) == m);

    std::stringstream buf;
    write_transcript(buf, m);
    CHECK(parse_transcript(buf, m.story_id) == m);
  }
}

TEST_CASE("written times keep three decimals") {
  Transcript t;
  t.tokens.push_back({"a", 1.0, 1.5, 0});
  std::ostringstream out;
  write_transcript(out, t);
  CHECK(out.str() == "word\tonset\toffset\tsentence_id\na\t1.000\t1.500\t0\n");
}

TEST_CASE("validate rejects broken tokens") {
  Transcript t;
  CHECK_THROWS_AS(validate(t), InputError);
  t.tokens.push_back({"", 0.0, 0.1, 0});
  CHECK_THROWS_AS(validate(t), InputError);
  t.tokens[0] = {"a", 0.2, 0.1, 0};
  CHECK_THROWS_AS(validate(t), InputError);
}

TEST_CASE("annotations") {
  std::istringstream in("sentence_id\tlevel\tcontent\n0\tword\theat, cozy\n3\tsentence\tThe kitchen was warm.\n");
  const auto recs = parse_annotations(in);
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].sentence_id == 3);
  CHECK(recs[1].level == AugmentationLevel::sentence);
  std::istringstream bad("0\tphrase\tx\n");
  CHECK_THROWS_AS(parse_annotations(bad), ParseError);
}

}  // TEST_SUITE
