#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "shuffleval/backend.hpp"
#include "shuffleval/corpus.hpp"

namespace shuffleval {

enum class TemplateKind { low_resource, conlang };

std::string_view to_string(TemplateKind kind);
TemplateKind parse_template_kind(std::string_view s);

struct ConlangContext {
  std::string language;
  std::string species;
  std::string planet;
  std::string conculture;
  std::string conlang;
};

struct TranslationJob {
  SegmentedDocument document;
  std::string translator_model;
  TemplateKind template_kind = TemplateKind::low_resource;
  std::optional<ConlangContext> conlang_context;
  // Human-readable source language name for the low-resource template.
  // Empty -> document metadata "language_name", then document.language.
  std::string source_language;

  std::string effective_source_language() const;
};

// Tag used to delimit the source text in the low-resource template:
// ASCII-uppercased, spaces become underscores ("Old Norse" -> "OLD_NORSE").
std::string source_language_tag(std::string_view language);

std::string render_translation_prompt(std::string_view segment, const TranslationJob& job);

// First well-formed <ENGLISH_TRANSLATION> or <TRANSLATION> block (whichever
// opens first), trimmed. nullopt when neither is present and closed.
std::optional<std::string> extract_translation(std::string_view reply);

// One independent call per segment. Segments that never yield a delimited
// block become "" with a flag; only transport exhaustion throws.
SegmentedTranslation translate_document(const TranslationJob& job, Client& client);
SegmentedTranslation translate_document(const TranslationJob& job, const BackendConfig& cfg);

// Same job with every segment concatenated into one (whole-document mode).
TranslationJob whole_document_job(const TranslationJob& job);

}  // namespace shuffleval
