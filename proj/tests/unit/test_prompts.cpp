#include <gtest/gtest.h>

#include "shuffleval/conlang.hpp"
#include "shuffleval/judge.hpp"
#include "shuffleval/scorer.hpp"
#include "shuffleval/translator.hpp"
#include "support.hpp"

using namespace shuffleval;
using testsupport::golden;

namespace {

ConlangIdea idea() { return {"Oss", "Thrummers", "Vel'ar", "Ogham", "They speak in tides"}; }

SegmentedDocument one_segment(std::string segment, std::string language) {
  SegmentedDocument d;
  d.doc_id = "g";
  d.language = std::move(language);
  d.segments = {std::move(segment)};
  return d;
}

}  // namespace

TEST(Golden, ShufflePrompt) {
  OrderingPair p{{"1. Alpha.", "2. Beta."}, {"2. Beta.", "1. Alpha."}, "a Wikipedia article"};
  EXPECT_EQ(render_shuffle_prompt(p, true), golden("shuffle.txt"));
}

TEST(Golden, BaselinePrompt) {
  EXPECT_EQ(render_baseline_prompt(testsupport::translation({"Ref one.", "Ref two."}),
                                   testsupport::translation({"MT one.", "MT two."})),
            golden("baseline.txt"));
}

TEST(Golden, LowResourceTranslationPrompt) {
  TranslationJob job{one_segment("Sannu da zuwa.", "ha"), "m", TemplateKind::low_resource, std::nullopt, "Hausa"};
  EXPECT_EQ(render_translation_prompt("Sannu da zuwa.", job), golden("translate_low_resource.txt"));
}

TEST(Golden, ConlangTranslationPrompt) {
  TranslationJob job{one_segment("ka vel tor.", "Vel'ar"), "m", TemplateKind::conlang,
                     ConlangContext{"Vel'ar", "Thrummers", "Oss", "CONCULTURE BODY", "CONLANG BODY"}, ""};
  EXPECT_EQ(render_translation_prompt("ka vel tor.", job), golden("translate_conlang.txt"));
}

TEST(Golden, IdeationPrompt) { EXPECT_EQ(render_ideation_prompt(10), golden("ideation.txt")); }

TEST(Golden, ConculturePrompt) { EXPECT_EQ(render_conculture_prompt(idea()), golden("conculture.txt")); }

TEST(Golden, ConlangDefinitionPrompt) {
  EXPECT_EQ(render_conlang_prompt(idea(), "CONCULTURE BODY"), golden("conlang_definition.txt"));
}

TEST(Golden, ParallelTextPrompt) {
  EXPECT_EQ(render_parallel_text_prompt(idea(), "CONCULTURE BODY", "CONLANG BODY"), golden("parallel_texts.txt"));
}

TEST(Golden, PlaceholderValuesAreNotRescanned) {
  ConlangIdea tricky = idea();
  tricky.species = "{planet}";
  const auto p = render_conculture_prompt(tricky);
  EXPECT_NE(p.find("for the {planet} alien species"), std::string::npos);
  EXPECT_NE(p.find("inhabit the planet Oss."), std::string::npos);
}
