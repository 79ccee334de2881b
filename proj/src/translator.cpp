#include "shuffleval/translator.hpp"

#include "shuffleval/errors.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {
namespace {

constexpr std::string_view kLowResourceTemplate =
    "Translate the following text from {source_language} to English:\n"
    "\n"
    "<{SOURCE_LANGUAGE}>\n"
    "{text}\n"
    "</{SOURCE_LANGUAGE}>\n"
    "\n"
    "Your output should be in the following format:\n"
    "\n"
    "<ENGLISH_TRANSLATION>\n"
    "...\n"
    "</ENGLISH_TRANSLATION>";

constexpr std::string_view kConlangTemplate =
    "Translate the following text from \"{language}\" to English. {language} is a constructed language "
    "spoken by {species} on the planet {planet}.\n"
    "\n"
    "<TEXT_TO_TRANSLATE>\n"
    "{source}\n"
    "</TEXT_TO_TRANSLATE>\n"
    "\n"
    "To help in the translation, here is detailed information about the culture and {language} language.\n"
    "\n"
    "{conculture}\n"
    "\n"
    "{conlang}\n"
    "\n"
    "# Instructions\n"
    "\n"
    "**Recall that the only text you are translating is the following, based on the above description of "
    "{language}:**\n"
    "\n"
    "<TEXT_TO_TRANSLATE>\n"
    "{source}\n"
    "</TEXT_TO_TRANSLATE>\n"
    "\n"
    "Just output your translation (no commentary) in the following format:\n"
    "\n"
    "<TRANSLATION>\n"
    "(english translation)\n"
    "</TRANSLATION>";

}  // namespace

std::string_view to_string(TemplateKind kind) {
  return kind == TemplateKind::conlang ? "conlang" : "low_resource";
}

TemplateKind parse_template_kind(std::string_view s) {
  if (s == "low_resource") return TemplateKind::low_resource;
  if (s == "conlang") return TemplateKind::conlang;
  throw ArgumentError("unknown template kind \"" + std::string(s) + "\"");
}

std::string TranslationJob::effective_source_language() const {
  if (!source_language.empty()) return source_language;
  if (auto it = document.metadata.find("language_name"); it != document.metadata.end()) return it->second;
  return document.language;
}

std::string source_language_tag(std::string_view language) {
  auto tag = text::to_upper_ascii(language);
  for (char& c : tag)
    if (c == ' ') c = '_';
  return tag;
}

std::string render_translation_prompt(std::string_view segment, const TranslationJob& job) {
  if (text::trim(segment).empty()) throw ArgumentError("render_translation_prompt: empty segment");
  if (job.template_kind == TemplateKind::low_resource) {
    const auto lang = job.effective_source_language();
    return text::fill(kLowResourceTemplate, {{"source_language", lang},
                                             {"SOURCE_LANGUAGE", source_language_tag(lang)},
                                             {"text", std::string(segment)}});
  }
  if (!job.conlang_context) throw ArgumentError("conlang template requires a conlang context");
  const auto& c = *job.conlang_context;
  return text::fill(kConlangTemplate, {{"language", c.language},
                                       {"species", c.species},
                                       {"planet", c.planet},
                                       {"source", std::string(segment)},
                                       {"conculture", c.conculture},
                                       {"conlang", c.conlang}});
}

std::optional<std::string> extract_translation(std::string_view reply) {
  std::optional<std::string> best;
  std::size_t best_pos = std::string_view::npos;
  for (std::string_view tag : {"ENGLISH_TRANSLATION", "TRANSLATION"}) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    // Scan opens in order until one has a matching close after it.
    for (auto b = reply.find(open); b != std::string_view::npos; b = reply.find(open, b + 1)) {
      const auto e = reply.find(close, b + open.size());
      if (e == std::string_view::npos) break;
      if (b < best_pos) {
        best_pos = b;
        best = std::string(text::trim(reply.substr(b + open.size(), e - b - open.size())));
      }
      break;
    }
  }
  return best;
}

SegmentedTranslation translate_document(const TranslationJob& job, Client& client) {
  if (job.document.segments.empty()) throw ArgumentError("translate_document: document has no segments");
  if (job.template_kind == TemplateKind::conlang && !job.conlang_context)
    throw ArgumentError("conlang template requires a conlang context");
  SegmentedTranslation out;
  out.doc_id = job.document.doc_id;
  out.translator_id = job.translator_model;
  out.segments.resize(job.document.segments.size());
  const int max_attempts = client.config().max_retries + 1;
  for (std::size_t i = 0; i < job.document.segments.size(); ++i) {
    const auto prompt = render_translation_prompt(job.document.segments[i], job);
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
      if (auto t = extract_translation(client.complete(prompt, attempt))) {
        out.segments[i] = std::move(*t);
        ok = true;
      }
    }
    if (!ok) out.flags.push_back("segment " + std::to_string(i) + ": missing output delimiters");
  }
  return out;
}

SegmentedTranslation translate_document(const TranslationJob& job, const BackendConfig& cfg) {
  auto client = make_client(cfg);
  return translate_document(job, *client);
}

TranslationJob whole_document_job(const TranslationJob& job) {
  TranslationJob whole = job;
  whole.document.segments = {text::join(job.document.segments, "\n\n")};
  return whole;
}

}  // namespace shuffleval
