#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shuffleval/backend.hpp"
#include "shuffleval/corpus.hpp"
#include "shuffleval/translator.hpp"

namespace shuffleval {

inline constexpr std::size_t kTextsPerBundle = 10;

struct ConlangIdea {
  std::string planet;
  std::string species;
  std::string language;
  std::string script;
  std::string property;

  void validate() const;  // every field non-empty, else ValidationError
  friend bool operator==(const ConlangIdea&, const ConlangIdea&) = default;
};

struct ConlangText {
  std::vector<std::string> source;   // conlang sentences
  std::vector<std::string> english;  // aligned reference sentences
  friend bool operator==(const ConlangText&, const ConlangText&) = default;
};

struct ConlangBundle {
  ConlangIdea idea;
  std::string conculture;
  std::string conlang_definition;
  std::vector<ConlangText> texts;
  std::string additional_vocabulary;

  // Exactly kTextsPerBundle texts, each with equal non-zero sentence counts
  // and no blank sentences; ValidationError otherwise.
  void validate() const;
  friend bool operator==(const ConlangBundle&, const ConlangBundle&) = default;
};

std::string render_ideation_prompt(std::size_t n);
std::string render_conculture_prompt(const ConlangIdea& idea);
std::string render_conlang_prompt(const ConlangIdea& idea, std::string_view conculture);
std::string render_parallel_text_prompt(const ConlangIdea& idea, std::string_view conculture,
                                        std::string_view conlang_definition);

// Strict JSON parse with one repair pass (fenced code blocks stripped,
// trailing commas dropped). Returns the serialized JSON of the parsed value;
// ParseError when the repaired text still fails.
std::string repair_structured_output(std::string_view reply);

// One call producing n ideas; GenerationError("ideation") on a parse failure
// or wrong count after the client's retries.
std::vector<ConlangIdea> ideate(std::size_t n, Client& client);

// Shannon entropy (bits) of the planet names' first letters.
double initial_letter_entropy(const std::vector<ConlangIdea>& ideas);

// Conculture, conlang definition, then parallel texts, in sequence.
// Stage failures throw GenerationError naming "conculture", "conlang" or
// "texts"; misaligned texts throw ValidationError.
ConlangBundle generate_bundle(const ConlangIdea& idea, Client& client);

struct LeakageRemoval {
  std::size_t text_index = 0;
  std::size_t sentence_index = 0;
  std::string rule;  // "substring" | "parenthetical" | "whole_sentence" (reported, not removed)
  std::string removed;
  std::string before;
  std::string after;
};

inline constexpr std::size_t kMinSubstringLeakWords = 4;
inline constexpr std::size_t kMinParentheticalLeakWords = 2;
inline constexpr double kParentheticalOverlap = 0.8;

struct ScrubResult {
  ConlangBundle bundle;
  std::vector<LeakageRemoval> removals;
};

// Removes aligned English sentences embedded in their source sentences:
// case-insensitive occurrences of the full English sentence (>= 4 words,
// final punctuation optional) and parenthesized spans (>= 2 words) whose
// words are more than 80% drawn from the English sentence.
ScrubResult scrub_leakage(const ConlangBundle& bundle);

std::string bundle_to_json(const ConlangBundle& bundle);
ConlangBundle bundle_from_json(std::string_view json_text);

// Filesystem-safe directory name for a language.
std::string bundle_dir_name(std::string_view language);

// Texts as a corpus: one sentence-granularity document per text (conlang
// sentences) with the English sentences as its reference.
ParallelCorpus bundle_corpus(const ConlangBundle& bundle);

// <dir>/idea.json, conculture.txt, conlang.txt, additional_vocabulary.txt,
// texts.corpus, leakage.json.
void write_bundle(const ConlangBundle& bundle, const std::vector<LeakageRemoval>& removals,
                  const std::filesystem::path& dir);
ConlangBundle load_bundle(const std::filesystem::path& dir);

// Translation context (language, species, planet, conculture, conlang) from a bundle.
ConlangContext conlang_context(const ConlangBundle& bundle);

}  // namespace shuffleval
