#include <gtest/gtest.h>

#include "shuffleval/corpus.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/text.hpp"
#include "support.hpp"

using namespace shuffleval;

TEST(Text, FillIsSinglePass) {
  EXPECT_EQ(text::fill("{a} and {b}", {{"a", "{b}"}, {"b", "x"}}), "{b} and x");
  EXPECT_EQ(text::fill("{unknown} {a}", {{"a", "1"}}), "{unknown} 1");
  EXPECT_EQ(text::fill("{a}{a}", {{"a", "z"}}), "zz");
}

TEST(Text, WordTokens) {
  EXPECT_EQ(text::word_tokens("The river, sings!"), (std::vector<std::string>{"the", "river", "sings"}));
  EXPECT_EQ(text::word_tokens("Ko'ath 42x"), (std::vector<std::string>{"ko'ath", "42x"}));
  EXPECT_EQ(text::word_tokens("ⲁⲃ ⲅ").size(), 2u);
}

TEST(Text, TaggedBlock) {
  std::size_t end = 0;
  const auto b = text::tagged_block("junk <T>inner</T> tail", "T", &end);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, "inner");
  EXPECT_EQ(end, 17u);
  EXPECT_FALSE(text::tagged_block("<T>unterminated", "T"));
}

TEST(Text, Utf8Length) {
  EXPECT_EQ(text::utf8_length("abc"), 3u);
  EXPECT_EQ(text::utf8_length("ḫa"), 2u);
}

TEST(Text, AtomicWriteRoundTrip) {
  testsupport::TempDir dir("text");
  const auto p = dir.path() / "sub" / "f.txt";
  text::write_file_atomic(p, "hello\n");
  EXPECT_EQ(text::read_file(p), "hello\n");
  text::write_file_atomic(p, "again");
  EXPECT_EQ(text::read_file(p), "again");
}

namespace {

const char* kTwoDocs =
    R"({"kind":"doc","doc_id":"a","language":"ha","segments":["One.","Two."],"metadata":{"char_count":3500}})"
    "\n"
    R"({"kind":"doc","doc_id":"b","language":"yo","granularity":"sentence","segments":["Uno."]})"
    "\n\n"
    R"({"kind":"ref","doc_id":"a","language":"en","translator_id":"human","segments":["1","2"]})"
    "\n"
    R"({"kind":"ref","doc_id":"b","translator_id":"human","segments":["u"]})"
    "\n";

}  // namespace

TEST(Corpus, ParsesDocumentsAndReferences) {
  const auto c = parse_corpus(kTwoDocs);
  EXPECT_EQ(c.documents.size(), 2u);
  EXPECT_EQ(c.references.size(), 2u);
  EXPECT_EQ(c.documents[1].granularity, Granularity::sentence);
  EXPECT_EQ(c.documents[0].metadata.at("char_count"), "3500");
  ASSERT_NE(c.reference("a"), nullptr);
  EXPECT_EQ(c.reference("a")->segments.size(), 2u);
}

TEST(Corpus, WriterRoundTripIsByteStable) {
  const auto c = parse_corpus(kTwoDocs);
  const auto once = write_corpus(c);
  const auto twice = write_corpus(parse_corpus(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(parse_corpus(once).documents.size(), 2u);
}

TEST(Corpus, ReferenceToUnknownDocIsRejected) {
  EXPECT_THROW(parse_corpus(R"({"kind":"ref","doc_id":"zz","translator_id":"h","segments":["x"]})"), ValidationError);
}

TEST(Corpus, EmptySegmentsRejected) {
  EXPECT_THROW(parse_corpus(R"({"kind":"doc","doc_id":"a","language":"ha","segments":[]})"), ValidationError);
}

TEST(Corpus, MisalignedReferenceRejected) {
  EXPECT_THROW(parse_corpus(std::string(R"({"kind":"doc","doc_id":"a","language":"ha","segments":["x","y"]})") +
                            "\n" + R"({"kind":"ref","doc_id":"a","translator_id":"h","segments":["x"]})"),
               ValidationError);
}

TEST(Corpus, DuplicateDocRejected) {
  const std::string line = R"({"kind":"doc","doc_id":"a","language":"ha","segments":["x"]})";
  EXPECT_THROW(parse_corpus(line + "\n" + line), ValidationError);
}

TEST(Corpus, ParseErrorNamesTheLine) {
  try {
    parse_corpus(std::string(R"({"kind":"doc","doc_id":"a","language":"ha","segments":["x"]})") + "\n{broken");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_corpus(R"({"kind":"weird"})"), ParseError);
  EXPECT_THROW(parse_corpus(R"({"kind":"doc","doc_id":"a","language":"ha","segments":[1]})"), ParseError);
}

TEST(Corpus, TranslationsRoundTrip) {
  SegmentedTranslation t = testsupport::translation({"a", ""}, "d1", "m1");
  t.flags = {"segment 1: missing output delimiters"};
  const auto text = write_translations({t});
  const auto back = parse_translations(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].segments, t.segments);
  EXPECT_EQ(back[0].flags, t.flags);
  EXPECT_EQ(write_translations(back), text);
}

TEST(Dates, StrictParsing) {
  EXPECT_TRUE(parse_date("2024-02-29"));
  EXPECT_FALSE(parse_date("2023-02-29"));
  EXPECT_FALSE(parse_date("2024-6-01"));
  EXPECT_FALSE(parse_date("2024-13-01"));
  EXPECT_FALSE(parse_date("2024-06-01 "));
}

namespace {

SegmentedDocument doc_with(std::string id, std::map<std::string, std::string> md, std::size_t k = 2) {
  SegmentedDocument d;
  d.doc_id = std::move(id);
  d.language = "ha";
  for (std::size_t i = 0; i < k; ++i) d.segments.push_back("Segment " + std::to_string(i) + ".");
  d.metadata = std::move(md);
  return d;
}

}  // namespace

TEST(Filter, MinCharsExcludesShortArticle) {
  ParallelCorpus c;
  c.documents = {doc_with("short", {{"char_count", "2999"}}), doc_with("long", {{"char_count", "3000"}})};
  ArticleFilter f;
  f.min_chars = 3000;
  const auto r = filter_articles(c, f);
  ASSERT_EQ(r.corpus.documents.size(), 1u);
  EXPECT_EQ(r.corpus.documents[0].doc_id, "long");
  EXPECT_EQ(r.excluded, (std::vector<std::string>{"short"}));
}

TEST(Filter, CutoffIsStrictlyAfter) {
  ParallelCorpus c;
  c.documents = {doc_with("may", {{"creation_date", "2024-05-31"}}), doc_with("same", {{"creation_date", "2024-06-01"}}),
                 doc_with("june", {{"creation_date", "2024-06-02"}}), doc_with("undated", {})};
  ArticleFilter f;
  f.created_after = parse_date("2024-06-01");
  const auto r = filter_articles(c, f);
  ASSERT_EQ(r.corpus.documents.size(), 1u);
  EXPECT_EQ(r.corpus.documents[0].doc_id, "june");
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].doc_id, "undated");
}

TEST(Filter, VacuousPredicatesAreIdentity) {
  const auto c = parse_corpus(kTwoDocs);
  const auto r = filter_articles(c, {});
  EXPECT_EQ(write_corpus(r.corpus), write_corpus(c));
  EXPECT_TRUE(r.excluded.empty());
}

TEST(Filter, RequireReference) {
  auto c = parse_corpus(kTwoDocs);
  c.references.erase("b");
  ArticleFilter f;
  f.require_reference = true;
  const auto r = filter_articles(c, f);
  ASSERT_EQ(r.corpus.documents.size(), 1u);
  EXPECT_EQ(r.corpus.documents[0].doc_id, "a");
}

TEST(Filter, CharCountFallsBackToCodePoints) {
  auto d = doc_with("x", {});
  d.segments = {"ab", "ḫ"};
  EXPECT_EQ(char_count(d), 3u);
  d.metadata["char_count"] = "oops";
  EXPECT_THROW(char_count(d), ValidationError);
}

TEST(Truncate, KeepsLeadingSegments) {
  const auto d = doc_with("x", {}, 10);
  const auto t = truncate_segments(d, 6);
  ASSERT_EQ(t.k(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(t.segments[i], d.segments[i]);
  EXPECT_EQ(truncate_segments(doc_with("y", {}, 3), 6).k(), 3u);
  EXPECT_EQ(truncate_segments(doc_with("z", {}, 6), 1).k(), 1u);
  EXPECT_THROW(truncate_segments(d, 0), ArgumentError);
}

TEST(Segmentation, ParagraphsAndSentences) {
  EXPECT_EQ(split_paragraphs("One.\nStill one.\n\n\nTwo."),
            (std::vector<std::string>{"One.\nStill one.", "Two."}));
  EXPECT_EQ(split_sentences("A b. C d? E! 3.5 stays"),
            (std::vector<std::string>{"A b.", "C d?", "E!", "3.5 stays"}));
}

TEST(Corpus, FixtureLoads) {
  const auto c = load_corpus(testsupport::fixture("tags.jsonl"));
  EXPECT_EQ(c.documents.size(), 9u);
  EXPECT_EQ(c.references.size(), 9u);
}
