#include "shuffleval/corpus.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

namespace {

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::strict) + "\n";
}

const json& require(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(std::string("missing field \"") + key + "\"", line);
  return *it;
}

std::string require_string(const json& rec, const char* key, std::size_t line) {
  const auto& v = require(rec, key, line);
  if (!v.is_string()) throw ParseError(std::string("field \"") + key + "\" must be a string", line);
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const char* key, std::size_t line) {
  if (!v.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a list", line);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) {
    if (!s.is_string()) throw ParseError(std::string("\"") + key + "\" entries must be strings", line);
    out.push_back(s.get<std::string>());
  }
  return out;
}

template <typename Fn>
void for_each_record(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, "\n")) {
    ++line_no;
    if (text::trim(raw).empty()) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record must be a JSON object", line_no);
    fn(rec, line_no);
  }
}

SegmentedTranslation translation_from(const json& rec, std::size_t line, bool with_flags) {
  SegmentedTranslation t;
  t.doc_id = require_string(rec, "doc_id", line);
  t.translator_id = require_string(rec, "translator_id", line);
  if (rec.contains("language")) t.language = require_string(rec, "language", line);
  t.segments = string_list(require(rec, "segments", line), "segments", line);
  if (with_flags && rec.contains("flags")) t.flags = string_list(rec["flags"], "flags", line);
  return t;
}

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::paragraph: return "paragraph";
    case Granularity::sentence: return "sentence";
    case Granularity::turn: return "turn";
  }
  return "paragraph";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "paragraph") return Granularity::paragraph;
  if (s == "sentence") return Granularity::sentence;
  if (s == "turn") return Granularity::turn;
  throw ArgumentError("unknown granularity \"" + std::string(s) + "\"");
}

const SegmentedDocument* ParallelCorpus::find(std::string_view doc_id) const {
  auto it = std::find_if(documents.begin(), documents.end(),
                         [&](const SegmentedDocument& d) { return d.doc_id == doc_id; });
  return it == documents.end() ? nullptr : &*it;
}

const SegmentedTranslation* ParallelCorpus::reference(std::string_view doc_id) const {
  auto it = references.find(std::string(doc_id));
  return it == references.end() ? nullptr : &it->second;
}

void validate(const SegmentedDocument& doc) {
  if (doc.doc_id.empty()) throw ValidationError("document with empty doc_id");
  if (doc.segments.empty()) throw ValidationError("document " + doc.doc_id + " has no segments");
  for (std::size_t i = 0; i < doc.segments.size(); ++i)
    if (text::trim(doc.segments[i]).empty())
      throw ValidationError("document " + doc.doc_id + " segment " + std::to_string(i) + " is blank");
}

void validate(const ParallelCorpus& corpus) {
  std::set<std::string> seen;
  for (const auto& d : corpus.documents) {
    validate(d);
    if (!seen.insert(d.doc_id).second) throw ValidationError("duplicate doc_id " + d.doc_id);
  }
  for (const auto& [id, ref] : corpus.references) {
    const auto* doc = corpus.find(id);
    if (!doc) throw ValidationError("reference for unknown doc_id " + id);
    if (ref.segments.size() != doc->segments.size())
      throw ValidationError("reference " + id + " has " + std::to_string(ref.segments.size()) +
                            " segments, document has " + std::to_string(doc->segments.size()));
  }
}

ParallelCorpus parse_corpus(std::string_view content, std::string name) {
  ParallelCorpus corpus;
  corpus.name = std::move(name);
  for_each_record(content, [&](const json& rec, std::size_t line) {
    const auto kind = require_string(rec, "kind", line);
    if (kind == "doc") {
      SegmentedDocument doc;
      doc.doc_id = require_string(rec, "doc_id", line);
      doc.language = require_string(rec, "language", line);
      if (rec.contains("granularity")) {
        try {
          doc.granularity = parse_granularity(require_string(rec, "granularity", line));
        } catch (const ArgumentError& e) {
          throw ParseError(e.what(), line);
        }
      }
      doc.segments = string_list(require(rec, "segments", line), "segments", line);
      if (rec.contains("metadata")) {
        const auto& md = rec["metadata"];
        if (!md.is_object()) throw ParseError("\"metadata\" must be an object", line);
        for (const auto& [k, v] : md.items())
          doc.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      try {
        validate(doc);
      } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line) + ": " + e.what());
      }
      if (corpus.find(doc.doc_id))
        throw ValidationError("line " + std::to_string(line) + ": duplicate doc_id " + doc.doc_id);
      corpus.documents.push_back(std::move(doc));
    } else if (kind == "ref") {
      auto ref = translation_from(rec, line, false);
      if (corpus.references.count(ref.doc_id))
        throw ValidationError("line " + std::to_string(line) + ": duplicate reference " + ref.doc_id);
      corpus.references.emplace(ref.doc_id, std::move(ref));
    } else {
      throw ParseError("unknown record kind \"" + kind + "\"", line);
    }
  });
  validate(corpus);
  return corpus;
}

ParallelCorpus load_corpus(const std::filesystem::path& path) {
  return parse_corpus(text::read_file(path), path.stem().string());
}

std::string write_corpus(const ParallelCorpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents) {
    json rec = {{"kind", "doc"},
                {"doc_id", d.doc_id},
                {"language", d.language},
                {"granularity", std::string(to_string(d.granularity))},
                {"segments", d.segments},
                {"metadata", json::object()}};
    for (const auto& [k, v] : d.metadata) rec["metadata"][k] = v;
    out += dump_line(rec);
  }
  for (const auto& d : corpus.documents) {
    const auto* ref = corpus.reference(d.doc_id);
    if (!ref) continue;
    out += dump_line({{"kind", "ref"},
                      {"doc_id", ref->doc_id},
                      {"language", ref->language},
                      {"translator_id", ref->translator_id},
                      {"segments", ref->segments}});
  }
  return out;
}

void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  text::write_file_atomic(path, write_corpus(corpus));
}

std::vector<SegmentedTranslation> parse_translations(std::string_view content) {
  std::vector<SegmentedTranslation> out;
  for_each_record(content, [&](const json& rec, std::size_t line) {
    const auto kind = require_string(rec, "kind", line);
    if (kind != "mt") throw ParseError("expected an \"mt\" record, got \"" + kind + "\"", line);
    out.push_back(translation_from(rec, line, true));
  });
  return out;
}

std::vector<SegmentedTranslation> load_translations(const std::filesystem::path& path) {
  return parse_translations(text::read_file(path));
}

std::string write_translations(const std::vector<SegmentedTranslation>& translations) {
  std::string out;
  for (const auto& t : translations)
    out += dump_line({{"kind", "mt"},
                      {"doc_id", t.doc_id},
                      {"translator_id", t.translator_id},
                      {"segments", t.segments},
                      {"flags", t.flags}});
  return out;
}

std::optional<CalendarDate> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t from, std::size_t n) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = from; i < from + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1) return std::nullopt;
  static constexpr int kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (*y % 4 == 0 && *y % 100 != 0) || *y % 400 == 0;
  const int max_day = (*m == 2 && !leap) ? 28 : kDays[*m - 1];
  if (*d > max_day) return std::nullopt;
  return CalendarDate{*y, *m, *d};
}

std::size_t char_count(const SegmentedDocument& doc) {
  if (auto it = doc.metadata.find("char_count"); it != doc.metadata.end()) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(it->second, &pos);
      if (pos == it->second.size()) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ValidationError("document " + doc.doc_id + ": char_count \"" + it->second +
                          "\" is not a non-negative integer");
  }
  std::size_t n = 0;
  for (const auto& s : doc.segments) n += text::utf8_length(s);
  return n;
}

FilterResult filter_articles(const ParallelCorpus& corpus, const ArticleFilter& filter) {
  FilterResult result;
  result.corpus.name = corpus.name;
  for (const auto& doc : corpus.documents) {
    if (filter.min_chars > 0) {
      std::size_t n = 0;
      try {
        n = char_count(doc);
      } catch (const ValidationError& e) {
        result.issues.push_back({doc.doc_id, e.what()});
        continue;
      }
      if (n < filter.min_chars) {
        result.excluded.push_back(doc.doc_id);
        continue;
      }
    }
    if (filter.created_after) {
      auto it = doc.metadata.find("creation_date");
      if (it == doc.metadata.end()) {
        result.issues.push_back({doc.doc_id, "missing creation_date metadata"});
        continue;
      }
      auto date = parse_date(it->second);
      if (!date) {
        result.issues.push_back({doc.doc_id, "unparseable creation_date \"" + it->second + "\""});
        continue;
      }
      if (!(*date > *filter.created_after)) {
        result.excluded.push_back(doc.doc_id);
        continue;
      }
    }
    const auto* ref = corpus.reference(doc.doc_id);
    if (filter.require_reference && !ref) {
      result.excluded.push_back(doc.doc_id);
      continue;
    }
    result.corpus.documents.push_back(doc);
    if (ref) result.corpus.references.emplace(doc.doc_id, *ref);
  }
  return result;
}

SegmentedDocument truncate_segments(const SegmentedDocument& doc, std::size_t max_segments) {
  if (max_segments == 0) throw ArgumentError("truncate_segments: max_segments must be >= 1");
  SegmentedDocument out = doc;
  if (out.segments.size() > max_segments) out.segments.resize(max_segments);
  return out;
}

std::vector<std::string> split_paragraphs(std::string_view text_in) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto t = text::trim(cur);
    if (!t.empty()) out.emplace_back(t);
    cur.clear();
  };
  for (const auto& line : text::split(text_in, "\n")) {
    if (text::trim(line).empty()) {
      flush();
    } else {
      if (!cur.empty()) cur.push_back('\n');
      cur += line;
    }
  }
  flush();
  return out;
}

std::vector<std::string> split_sentences(std::string_view text_in) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text_in.size(); ++i) {
    const char c = text_in[i];
    cur.push_back(c);
    const bool terminal = c == '.' || c == '!' || c == '?';
    const bool boundary = i + 1 == text_in.size() || text_in[i + 1] == ' ' || text_in[i + 1] == '\n';
    if (terminal && boundary) {
      auto t = text::trim(cur);
      if (!t.empty()) out.emplace_back(t);
      cur.clear();
    }
  }
  auto t = text::trim(cur);
  if (!t.empty()) out.emplace_back(t);
  return out;
}

}  // namespace shuffleval
