#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shuffleval {

enum class Granularity { paragraph, sentence, turn };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

// Source text split into ordered segments; the unit ShufflEval permutes.
struct SegmentedDocument {
  std::string doc_id;
  std::string language;
  std::vector<std::string> segments;
  Granularity granularity = Granularity::paragraph;
  std::map<std::string, std::string> metadata;

  std::size_t k() const noexcept { return segments.size(); }
};

// Target-side segments aligned 1:1 with a document's source segments. Used
// for human references ("ref" records) and machine output ("mt" records).
// flags carries per-segment failure notes for machine output.
struct SegmentedTranslation {
  std::string doc_id;
  std::string translator_id;
  std::string language = "en";
  std::vector<std::string> segments;
  std::vector<std::string> flags;
};

struct ParallelCorpus {
  std::string name;
  std::vector<SegmentedDocument> documents;
  std::map<std::string, SegmentedTranslation> references;

  const SegmentedDocument* find(std::string_view doc_id) const;
  const SegmentedTranslation* reference(std::string_view doc_id) const;
};

// Throws ValidationError on the first broken invariant.
void validate(const SegmentedDocument& doc);
void validate(const ParallelCorpus& corpus);

// Line-delimited JSON, one "doc" or "ref" record per line. Blank lines are
// skipped. Errors name the 1-based line.
ParallelCorpus parse_corpus(std::string_view content, std::string name = {});
ParallelCorpus load_corpus(const std::filesystem::path& path);

// Canonical form: documents in order, then references in document order,
// keys sorted, LF endings. load_corpus(write) reproduces the same bytes.
std::string write_corpus(const ParallelCorpus& corpus);
void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path);

// "mt" records produced by the translator.
std::vector<SegmentedTranslation> parse_translations(std::string_view content);
std::vector<SegmentedTranslation> load_translations(const std::filesystem::path& path);
std::string write_translations(const std::vector<SegmentedTranslation>& translations);

struct CalendarDate {
  int year = 0;
  int month = 0;
  int day = 0;
  auto operator<=>(const CalendarDate&) const = default;
};

// Strict YYYY-MM-DD; nullopt on anything else.
std::optional<CalendarDate> parse_date(std::string_view s);

struct ArticleFilter {
  std::size_t min_chars = 0;
  // Documents must be created strictly after this date.
  std::optional<CalendarDate> created_after;
  bool require_reference = false;
};

struct FilterIssue {
  std::string doc_id;
  std::string message;
};

struct FilterResult {
  ParallelCorpus corpus;
  std::vector<std::string> excluded;  // doc_ids failing a predicate
  std::vector<FilterIssue> issues;    // doc_ids excluded for missing/bad metadata
};

// char_count metadata wins when present; otherwise code points of the
// concatenated segments are counted.
std::size_t char_count(const SegmentedDocument& doc);

FilterResult filter_articles(const ParallelCorpus& corpus, const ArticleFilter& filter);

// Keeps the first max_segments segments. max_segments == 0 is an ArgumentError.
SegmentedDocument truncate_segments(const SegmentedDocument& doc, std::size_t max_segments);

// Local fixture helpers; production segmentation is ingested as given.
// Paragraphs: blank-line separated. Sentences: split after ". ", "! ", "? ".
std::vector<std::string> split_paragraphs(std::string_view text);
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace shuffleval
