#include "shuffleval/oracles.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "json.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/rng.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

namespace {

std::string strip_one_newline(std::string s) {
  if (!s.empty() && s.front() == '\n') s.erase(0, 1);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

struct FixtureIdea {
  const char* planet;
  const char* species;
  const char* language;
  const char* script;
  const char* property;
};

constexpr std::array<FixtureIdea, 10> kFixtureIdeas{{
    {"Moradel", "Vessin", "Ko'ath", "Telugu", "They store memories as layered crystal growths in their spines"},
    {"Tarn Eshel", "Glimmerfolk", "Ruvani", "Ogham", "Each of them is a colony of small gliders that vote on every movement"},
    {"Bexhollow", "Orrun", "Dashaq", "Tifinagh", "They hibernate in shared dreams that continue their conversations"},
    {"Cindermere", "Lask", "Pelu", "Cherokee", "Their shells change pattern to show what they are about to say"},
    {"Yonderreach", "Thessile", "Imbrai", "Glagolitic", "They trade organs with close friends as a sign of trust"},
    {"Fallowmoon", "Quillback", "Oskeni", "Mongolian", "They speak by exhaling scented mists in sequence"},
    {"Graventh", "Murrow", "Selvek", "Syriac", "They can only perceive objects that are moving"},
    {"Wick-9", "Aubrel", "Thaddo", "Thaana", "Their young are born knowing the last words their parents heard"},
    {"Ebbstone", "Corriel", "Nuvash", "Javanese", "They grow new limbs for each season of their lives"},
    {"Lanthe", "Poddle", "Zerika", "Runic", "They communicate by rhythmically dimming a shared bioluminescent field"},
}};

constexpr std::array<const char*, 12> kSyllables{"ka", "vel", "su", "ori", "tam", "qe", "lin", "dru", "ash", "mo", "yth", "ren"};
constexpr std::array<const char*, 8> kNouns{"river", "shard", "elder", "signal", "dawn", "circle", "harvest", "stone"};
constexpr std::array<const char*, 8> kVerbs{"sings", "waits", "returns", "burns", "listens", "turns", "divides", "rests"};

std::string between(std::string_view s, std::string_view before, std::string_view after) {
  const auto b = s.find(before);
  if (b == std::string_view::npos) return {};
  const auto start = b + before.size();
  const auto e = s.find(after, start);
  if (e == std::string_view::npos) return {};
  return std::string(s.substr(start, e - start));
}

std::string fixture_ideation(std::string_view prompt) {
  const auto n_text = between(prompt, "Output a JSON list of ", " such objects");
  std::size_t n = 0;
  try {
    n = std::stoul(n_text);
  } catch (const std::exception&) {
    return "I could not determine how many conlangs to produce.";
  }
  json list = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& idea = kFixtureIdeas[i % kFixtureIdeas.size()];
    std::string suffix = i < kFixtureIdeas.size() ? "" : "-" + std::to_string(i / kFixtureIdeas.size() + 1);
    list.push_back({{"planet", idea.planet + suffix},
                    {"species", idea.species + suffix},
                    {"language", idea.language + suffix},
                    {"script", idea.script},
                    {"property", idea.property}});
  }
  // Fenced, as chat models tend to reply; exercises the repair pass.
  return "```json\n" + list.dump(2) + "\n```";
}

std::string fixture_conculture(std::string_view prompt) {
  const auto species = between(prompt, "for the ", " alien species");
  const auto planet = between(prompt, "inhabit the planet ", ".\n");
  return "The " + species + " of " + planet +
         " gather at the shore of the singing river each dawn.\n\n"
         "Practice one: the circle of stones, a game of patience played by elders.\n\n"
         "Practice two: the harvest of signals, a ritual of listening.";
}

std::string fixture_conlang(std::string_view prompt) {
  const auto language = between(prompt, "called ", " for the ");
  return "# " + language +
         " grammar\n\nWords are built from the syllables ka, vel, su, ori, tam, qe, lin, dru, ash, mo, yth "
         "and ren.\nThe verb comes first; the subject follows.\n\n# Lexicon\n\nkavel: river\nsuori: sings";
}

std::string fixture_texts(std::string_view prompt) {
  const auto language = between(prompt, "Create 10 texts in the alien conlang ", " spoken by ");
  Rng rng(fnv1a64(language));
  json texts = json::array();
  for (int t = 0; t < 10; ++t) {
    const auto n_sentences = 6 + uniform_index(rng, 5);
    json src = json::array(), eng = json::array();
    for (std::size_t s = 0; s < n_sentences; ++s) {
      std::string word_a = std::string(kSyllables[uniform_index(rng, kSyllables.size())]) +
                           kSyllables[uniform_index(rng, kSyllables.size())];
      std::string word_b = std::string(kSyllables[uniform_index(rng, kSyllables.size())]) +
                           kSyllables[uniform_index(rng, kSyllables.size())];
      const std::string english = std::string("The ") + kNouns[uniform_index(rng, kNouns.size())] + " " +
                                  kVerbs[uniform_index(rng, kVerbs.size())] + " at dawn.";
      std::string source = word_a + " " + word_b + ".";
      // Planted leakage: the translation embedded in the source sentence.
      if (t == 3 && s == 1) source = word_a + " " + word_b + " (" + english.substr(0, english.size() - 1) + ").";
      if (t == 7 && s == 0) source = word_a + " " + english + " " + word_b + ".";
      src.push_back(source);
      eng.push_back(english);
    }
    texts.push_back({{language, src}, {"English", eng}});
  }
  json out = {{"texts", texts}, {"additional_vocabulary", "kavel: river; suori: to sing"}};
  // Trailing comma before the closing brace exercises the repair pass.
  auto dumped = out.dump(2);
  dumped.insert(dumped.size() - 2, ",");
  return dumped;
}

}  // namespace

std::vector<std::string> ordering_segments(std::string_view prompt, int slot) {
  auto block = text::tagged_block(prompt, slot == 1 ? "ORDERING1" : "ORDERING2");
  if (!block) return {};
  return text::split(strip_one_newline(*block), "\n\n");
}

std::string CoherenceJudgeBackend::complete(const std::string& prompt) {
  const auto a = ordering_segments(prompt, 1);
  const auto b = ordering_segments(prompt, 2);
  if (a.empty() || b.empty()) return "I can only compare two orderings.";
  return std::to_string(oracle_judge(a, b, coherence_));
}

std::string translation_prompt_source(std::string_view prompt) {
  if (auto block = text::tagged_block(prompt, "TEXT_TO_TRANSLATE")) return std::string(text::trim(*block));
  // Low-resource template: the source sits in the first "<TAG>" block after
  // the instruction line.
  const auto open = prompt.find("\n\n<");
  if (open == std::string_view::npos) return {};
  const auto tag_end = prompt.find(">\n", open + 3);
  if (tag_end == std::string_view::npos) return {};
  const auto tag = prompt.substr(open + 3, tag_end - open - 3);
  if (auto block = text::tagged_block(prompt.substr(open), tag)) return std::string(text::trim(*block));
  return {};
}

std::string EchoTranslatorBackend::complete(const std::string& prompt) {
  const auto source = translation_prompt_source(prompt);
  if (source.empty()) return "Sorry, I see nothing to translate.";
  const bool conlang = prompt.find("<TEXT_TO_TRANSLATE>") != std::string::npos;
  const std::string tag = conlang ? "TRANSLATION" : "ENGLISH_TRANSLATION";
  return "<" + tag + ">\n" + source + "\n</" + tag + ">";
}

std::string HallucinatingTranslatorBackend::complete(const std::string& prompt) {
  Rng rng(fnv1a64(prompt));
  const auto tag = 1 + uniform_index(rng, 1000);
  const std::string sentence = std::to_string(tag) + ". The " + kNouns[uniform_index(rng, kNouns.size())] + " " +
                               kVerbs[uniform_index(rng, kVerbs.size())] + " beside the old " +
                               kNouns[uniform_index(rng, kNouns.size())] + ".";
  const bool conlang = prompt.find("<TEXT_TO_TRANSLATE>") != std::string::npos;
  const std::string t = conlang ? "TRANSLATION" : "ENGLISH_TRANSLATION";
  return "<" + t + ">\n" + sentence + "\n</" + t + ">";
}

std::string OverlapBaselineBackend::complete(const std::string& prompt) {
  const auto ref = text::tagged_block(prompt, "HUMAN_REFERENCE");
  const auto cand = text::tagged_block(prompt, "MACHINE_TRANSLATION");
  if (!ref || !cand) return "No reference supplied.";
  const auto a = text::word_tokens(*ref), b = text::word_tokens(*cand);
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return "100";
  // Integer rounding of 100 * |A∩B| / |A∪B|.
  return std::to_string((200 * inter + uni) / (2 * uni));
}

std::string ConlangFixtureBackend::complete(const std::string& prompt) {
  if (prompt.starts_with("We are creating a diverse set of conlangs")) return fixture_ideation(prompt);
  if (prompt.starts_with("Create a vivid")) return fixture_conculture(prompt);
  if (prompt.starts_with("Create a \"conlang\"")) return fixture_conlang(prompt);
  if (prompt.starts_with("Create 10 texts")) return fixture_texts(prompt);
  return "Unrecognized request.";
}

std::vector<std::string> oracle_model_ids() {
  return {"oracle:ascending-tag", "oracle:always-1", "oracle:always-2", "oracle:echo",
          "oracle:hallucinate",   "oracle:overlap",  "oracle:conlang-fixture"};
}

std::shared_ptr<Backend> make_oracle_backend(std::string_view model_id) {
  if (model_id == "oracle:ascending-tag") return std::make_shared<CoherenceJudgeBackend>(ascending_tag_coherence);
  if (model_id == "oracle:always-1")
    return std::make_shared<CallbackBackend>([](const std::string&) { return std::string("1"); });
  if (model_id == "oracle:always-2")
    return std::make_shared<CallbackBackend>([](const std::string&) { return std::string("2"); });
  if (model_id == "oracle:echo") return std::make_shared<EchoTranslatorBackend>();
  if (model_id == "oracle:hallucinate") return std::make_shared<HallucinatingTranslatorBackend>();
  if (model_id == "oracle:overlap") return std::make_shared<OverlapBaselineBackend>();
  if (model_id == "oracle:conlang-fixture") return std::make_shared<ConlangFixtureBackend>();
  throw ConfigError("unknown synthetic oracle \"" + std::string(model_id) + "\"");
}

}  // namespace shuffleval
