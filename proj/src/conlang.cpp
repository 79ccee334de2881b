#include "shuffleval/conlang.hpp"

#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

namespace {

constexpr std::string_view kIdeationTemplate =
    "We are creating a diverse set of conlangs about an alien species. First, we are choosing the:\n"
    "* Name of the planet\n"
    "* Name of the species\n"
    "* Name of the language\n"
    "* The script, which should not be very common like the Latin script. It can be something rarer like the "
    "Telugu script.\n"
    "* Unexpected and unique property of the species that is not known in any Earth lifeform\n"
    "\n"
    "Output a JSON list of {number_of_conlangs} such objects, each with the following keys:\n"
    "\n"
    "Output a JSON object with the following keys:\n"
    "{\n"
    "    \"planet\": \"Name of the planet\",\n"
    "    \"species\": \"Name of the species\",\n"
    "    \"language\": \"Name of the language\",\n"
    "    \"script\": \"Name of the script\",\n"
    "    \"property\": \"Unexpected and unique properties of the species and communication that is not known in "
    "any Earth lifeform (including humans)\"\n"
    "}";

constexpr std::string_view kConcultureTemplate =
    "Create a vivid, detailed, and imaginative ”conculture” (constructed culture) for the {species} alien "
    "species who inhabit the planet {planet}.\n"
    "They are unique in that the following sense: {property}.\n"
    "The conculture should describe the planet and species in enough detail to write a novel about one of the "
    "aliens.\n"
    "The conculture should include detailed descriptions (e.g., at least 800 words each) of five practices (e.g., "
    "games, rituals, social norms, etc.). \n"
    "Their language, {language}, is written in the {script} script, but do not detail that here. That will be "
    "defined later.";

constexpr std::string_view kConlangTemplate =
    "Create a \"conlang\" (constructed language) called {language} for the {species} aliens described below. It "
    "will be written in the {script} script but the language itself will not resemble any human language.\n"
    "\n"
    "<CONCULTURE>\n"
    "{conculture}\n"
    "</CONCULTURE>\n"
    "\n"
    "The {language} conlang should be unique in at least one unexpected way that differs from any known existing "
    "language.\n"
    "As background, describe the fascinating communication patterns of the {species} in detail. Their "
    "communication must be entirely different from Earth species---so much so that a naive translation into "
    "English would be not be comprehensible without this background.\n"
    "The description should be long and detailed, especially the grammar and lexicon. The structure of "
    "conversations, meetings, and common topics should be detailed. If there are multiple dialects, just define "
    "and describe one.";

constexpr std::string_view kParallelTextTemplate =
    "Create 10 texts in the alien conlang {language} spoken by {species}, described below. The texts should be of "
    "varying lenths, with the shortest one being 6 sentences and the longest one being 20 sentences. Each text "
    "should have an English translation. \n"
    "At least 5 of the texts should rely on detailed descriptions of the {species} and practices/peculiarities in "
    "the <CONCULTURE> section below. It is fine if the texts use vocabulary not defined in the conlang below, just "
    "add it to the additional_vocabulary section.\n"
    "\n"
    "<CONCULTURE>\n"
    "{conculture}\n"
    "</CONCULTURE>\n"
    "\n"
    "<CONLANG>\n"
    "{conlang}\n"
    "</CONLANG>\n"
    "\n"
    "Your output should be in JSON with the following structure:\n"
    "\n"
    "{\n"
    "    \"texts\": [\n"
    "        {\n"
    "            \"{language}\": [list of strings for sentences],\n"
    "            \"English\": [list of strings for sentence translations]\n"
    "        }\n"
    "        ... # 9 more texts\n"
    "    ]\n"
    "    \"additional_vocabulary\": # long string with describing the additional vocabulary needed to understand "
    "the texts, if not present in the conlang above\n"
    "}";

std::vector<std::pair<std::string, std::string>> idea_fields(const ConlangIdea& idea) {
  return {{"planet", idea.planet},
          {"species", idea.species},
          {"language", idea.language},
          {"script", idea.script},
          {"property", idea.property}};
}

std::string strip_fences(std::string_view s) {
  const auto open = s.find("```");
  if (open == std::string_view::npos) return std::string(s);
  const auto body = s.find('\n', open);
  if (body == std::string_view::npos) return std::string(s);
  const auto close = s.find("```", body + 1);
  return std::string(s.substr(body + 1, close == std::string_view::npos ? std::string_view::npos : close - body - 1));
}

std::string drop_trailing_commas(std::string_view s) {
  std::string out;
  bool in_string = false, escaped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      auto j = s.find_first_not_of(" \t\r\n", i + 1);
      if (j != std::string_view::npos && (s[j] == '}' || s[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

json parse_structured(std::string_view reply) { return json::parse(repair_structured_output(reply)); }

std::string ask(Client& client, const std::string& prompt, int attempt, const char* stage) {
  try {
    return client.complete(prompt, attempt);
  } catch (const TransportError& e) {
    throw GenerationError(stage, std::string("transport failure: ") + e.what());
  }
}

ConlangIdea idea_from_json(const json& j) {
  ConlangIdea idea;
  idea.planet = j.at("planet").get<std::string>();
  idea.species = j.at("species").get<std::string>();
  idea.language = j.at("language").get<std::string>();
  idea.script = j.at("script").get<std::string>();
  idea.property = j.at("property").get<std::string>();
  return idea;
}

json idea_to_json(const ConlangIdea& idea) {
  return {{"planet", idea.planet},
          {"species", idea.species},
          {"language", idea.language},
          {"script", idea.script},
          {"property", idea.property}};
}

std::vector<ConlangText> texts_from_json(const json& j, std::string_view language) {
  std::vector<ConlangText> texts;
  for (const auto& t : j.at("texts")) {
    if (!t.is_object()) throw ParseError("text entry is not an object");
    ConlangText text;
    const json* src = nullptr;
    if (t.contains(std::string(language))) {
      src = &t.at(std::string(language));
    } else if (t.size() == 2 && t.contains("English")) {
      for (const auto& [k, v] : t.items())
        if (k != "English") src = &v;
    }
    if (!src) throw ParseError("text entry lacks a \"" + std::string(language) + "\" sentence list");
    text.source = src->get<std::vector<std::string>>();
    text.english = t.at("English").get<std::vector<std::string>>();
    texts.push_back(std::move(text));
  }
  return texts;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(c);
  }
  // No space before closing punctuation.
  std::string fixed;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == ' ' && i + 1 < out.size() && std::string_view(".,;:!?").find(out[i + 1]) != std::string_view::npos)
      continue;
    fixed.push_back(out[i]);
  }
  return std::string(text::trim(fixed));
}

// Removes [b, e) widened to enclosing brackets when they hug the span.
void erase_span(std::string& s, std::size_t b, std::size_t e) {
  if (b > 0 && e < s.size() && ((s[b - 1] == '(' && s[e] == ')') || (s[b - 1] == '[' && s[e] == ']'))) {
    --b;
    ++e;
  }
  s.erase(b, e - b);
}

}  // namespace

void ConlangIdea::validate() const {
  for (const auto& [name, value] : idea_fields(*this))
    if (text::trim(value).empty()) throw ValidationError("conlang idea field \"" + name + "\" is empty");
}

void ConlangBundle::validate() const {
  idea.validate();
  if (texts.size() != kTextsPerBundle)
    throw ValidationError("bundle " + idea.language + " has " + std::to_string(texts.size()) + " texts, expected " +
                          std::to_string(kTextsPerBundle));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& t = texts[i];
    if (t.source.empty() || t.source.size() != t.english.size())
      throw ValidationError("bundle " + idea.language + " text " + std::to_string(i) + ": " +
                            std::to_string(t.source.size()) + " source vs " + std::to_string(t.english.size()) +
                            " English sentences");
    for (std::size_t s = 0; s < t.source.size(); ++s)
      if (text::trim(t.source[s]).empty() || text::trim(t.english[s]).empty())
        throw ValidationError("bundle " + idea.language + " text " + std::to_string(i) + " sentence " +
                              std::to_string(s) + " is blank");
  }
}

std::string render_ideation_prompt(std::size_t n) {
  if (n == 0) throw ArgumentError("ideation needs n >= 1");
  return text::fill(kIdeationTemplate, {{"number_of_conlangs", std::to_string(n)}});
}

std::string render_conculture_prompt(const ConlangIdea& idea) { return text::fill(kConcultureTemplate, idea_fields(idea)); }

std::string render_conlang_prompt(const ConlangIdea& idea, std::string_view conculture) {
  auto fields = idea_fields(idea);
  fields.emplace_back("conculture", std::string(conculture));
  return text::fill(kConlangTemplate, fields);
}

std::string render_parallel_text_prompt(const ConlangIdea& idea, std::string_view conculture,
                                        std::string_view conlang_definition) {
  auto fields = idea_fields(idea);
  fields.emplace_back("conculture", std::string(conculture));
  fields.emplace_back("conlang", std::string(conlang_definition));
  return text::fill(kParallelTextTemplate, fields);
}

std::string repair_structured_output(std::string_view reply) {
  try {
    return json::parse(reply).dump();
  } catch (const json::parse_error&) {
  }
  const auto repaired = drop_trailing_commas(strip_fences(reply));
  try {
    return json::parse(repaired).dump();
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("structured output unparseable after repair: ") + e.what());
  }
}

std::vector<ConlangIdea> ideate(std::size_t n, Client& client) {
  const auto prompt = render_ideation_prompt(n);
  std::string reply, problem;
  for (int attempt = 0; attempt <= client.config().max_retries; ++attempt) {
    reply = ask(client, prompt, attempt, "ideation");
    try {
      const auto j = parse_structured(reply);
      if (!j.is_array()) throw ParseError("expected a JSON list");
      if (j.size() != n) throw ParseError("expected " + std::to_string(n) + " ideas, got " + std::to_string(j.size()));
      std::vector<ConlangIdea> ideas;
      for (const auto& item : j) {
        ideas.push_back(idea_from_json(item));
        ideas.back().validate();
      }
      return ideas;
    } catch (const json::exception& e) {
      problem = e.what();
    } catch (const Error& e) {
      problem = e.what();
    }
  }
  throw GenerationError("ideation", problem, reply);
}

double initial_letter_entropy(const std::vector<ConlangIdea>& ideas) {
  std::map<char, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& idea : ideas) {
    if (idea.planet.empty()) continue;
    const char c = idea.planet.front();
    ++counts[c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c];
    ++total;
  }
  double h = 0;
  for (const auto& [c, k] : counts) {
    const double p = static_cast<double>(k) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

ConlangBundle generate_bundle(const ConlangIdea& idea, Client& client) {
  idea.validate();
  ConlangBundle bundle;
  bundle.idea = idea;

  bundle.conculture = std::string(text::trim(ask(client, render_conculture_prompt(idea), 0, "conculture")));
  if (bundle.conculture.empty()) throw GenerationError("conculture", "empty reply");

  bundle.conlang_definition =
      std::string(text::trim(ask(client, render_conlang_prompt(idea, bundle.conculture), 0, "conlang")));
  if (bundle.conlang_definition.empty()) throw GenerationError("conlang", "empty reply");

  const auto prompt = render_parallel_text_prompt(idea, bundle.conculture, bundle.conlang_definition);
  std::string reply, problem;
  bool parsed = false;
  for (int attempt = 0; attempt <= client.config().max_retries && !parsed; ++attempt) {
    reply = ask(client, prompt, attempt, "texts");
    try {
      const auto j = parse_structured(reply);
      bundle.texts = texts_from_json(j, idea.language);
      if (j.contains("additional_vocabulary")) {
        const auto& v = j["additional_vocabulary"];
        bundle.additional_vocabulary = v.is_string() ? v.get<std::string>() : v.dump();
      }
      parsed = true;
    } catch (const json::exception& e) {
      problem = e.what();
    } catch (const ParseError& e) {
      problem = e.what();
    }
  }
  if (!parsed) throw GenerationError("texts", problem, reply);
  bundle.validate();
  return bundle;
}

ScrubResult scrub_leakage(const ConlangBundle& bundle) {
  ScrubResult result{bundle, {}};
  for (std::size_t t = 0; t < result.bundle.texts.size(); ++t) {
    auto& text_ref = result.bundle.texts[t];
    for (std::size_t s = 0; s < text_ref.source.size() && s < text_ref.english.size(); ++s) {
      const std::string before = text_ref.source[s];
      const std::string& english = text_ref.english[s];
      std::string cur = before;
      std::vector<LeakageRemoval> found;

      const auto eng_tokens = text::word_tokens(english);
      if (eng_tokens.size() >= kMinSubstringLeakWords) {
        std::string needle = std::string(text::trim(english));
        std::vector<std::string> needles{needle};
        while (!needle.empty() && std::string_view(".!?").find(needle.back()) != std::string_view::npos) {
          needle.pop_back();
          needles.push_back(needle);
        }
        for (const auto& n : needles) {
          const auto lower_n = text::to_lower_ascii(n);
          for (auto pos = text::to_lower_ascii(cur).find(lower_n); pos != std::string::npos;
               pos = text::to_lower_ascii(cur).find(lower_n)) {
            found.push_back({t, s, "substring", cur.substr(pos, n.size()), before, {}});
            erase_span(cur, pos, pos + n.size());
          }
        }
      }

      const std::set<std::string> eng_set(eng_tokens.begin(), eng_tokens.end());
      for (std::size_t open = cur.find('('); open != std::string::npos;) {
        const auto close = cur.find(')', open + 1);
        if (close == std::string::npos) break;
        const auto inner = text::word_tokens(std::string_view(cur).substr(open + 1, close - open - 1));
        std::size_t hits = 0;
        for (const auto& w : inner) hits += eng_set.count(w);
        if (inner.size() >= kMinParentheticalLeakWords &&
            static_cast<double>(hits) / static_cast<double>(inner.size()) > kParentheticalOverlap) {
          found.push_back({t, s, "parenthetical", cur.substr(open, close - open + 1), before, {}});
          cur.erase(open, close - open + 1);
          open = cur.find('(', open);
        } else {
          open = cur.find('(', close);
        }
      }

      if (found.empty()) continue;
      auto after = collapse_spaces(cur);
      if (after.empty()) {
        // The whole sentence is the translation; keep it so alignment holds.
        result.removals.push_back({t, s, "whole_sentence", before, before, before});
        continue;
      }
      for (auto& r : found) {
        r.after = after;
        result.removals.push_back(std::move(r));
      }
      text_ref.source[s] = std::move(after);
    }
  }
  return result;
}

std::string bundle_to_json(const ConlangBundle& bundle) {
  json texts = json::array();
  for (const auto& t : bundle.texts) texts.push_back({{"source", t.source}, {"english", t.english}});
  return json{{"idea", idea_to_json(bundle.idea)},
              {"conculture", bundle.conculture},
              {"conlang_definition", bundle.conlang_definition},
              {"texts", texts},
              {"additional_vocabulary", bundle.additional_vocabulary}}
      .dump(2);
}

ConlangBundle bundle_from_json(std::string_view json_text) {
  try {
    const auto j = json::parse(json_text);
    ConlangBundle b;
    b.idea = idea_from_json(j.at("idea"));
    b.conculture = j.at("conculture").get<std::string>();
    b.conlang_definition = j.at("conlang_definition").get<std::string>();
    for (const auto& t : j.at("texts"))
      b.texts.push_back({t.at("source").get<std::vector<std::string>>(), t.at("english").get<std::vector<std::string>>()});
    b.additional_vocabulary = j.at("additional_vocabulary").get<std::string>();
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad bundle JSON: ") + e.what());
  }
}

std::string bundle_dir_name(std::string_view language) {
  std::string out;
  for (unsigned char c : language) {
    const bool keep = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' || c == '_';
    out.push_back(keep ? static_cast<char>(c) : '_');
  }
  return out.empty() ? "conlang" : out;
}

ParallelCorpus bundle_corpus(const ConlangBundle& bundle) {
  ParallelCorpus corpus;
  corpus.name = bundle_dir_name(bundle.idea.language);
  for (std::size_t i = 0; i < bundle.texts.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "-text-%02zu", i + 1);
    SegmentedDocument doc;
    doc.doc_id = corpus.name + id;
    doc.language = bundle.idea.language;
    doc.granularity = Granularity::sentence;
    doc.segments = bundle.texts[i].source;
    doc.metadata = {{"conlang", bundle.idea.language}, {"species", bundle.idea.species}, {"planet", bundle.idea.planet}};
    SegmentedTranslation ref;
    ref.doc_id = doc.doc_id;
    ref.translator_id = "reference";
    ref.language = "en";
    ref.segments = bundle.texts[i].english;
    corpus.references.emplace(doc.doc_id, std::move(ref));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

void write_bundle(const ConlangBundle& bundle, const std::vector<LeakageRemoval>& removals,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  text::write_file_atomic(dir / "idea.json", idea_to_json(bundle.idea).dump(2) + "\n");
  text::write_file_atomic(dir / "conculture.txt", bundle.conculture);
  text::write_file_atomic(dir / "conlang.txt", bundle.conlang_definition);
  text::write_file_atomic(dir / "additional_vocabulary.txt", bundle.additional_vocabulary);
  save_corpus(bundle_corpus(bundle), dir / "texts.corpus");
  json report = json::array();
  for (const auto& r : removals)
    report.push_back({{"text_index", r.text_index},
                      {"sentence_index", r.sentence_index},
                      {"rule", r.rule},
                      {"removed", r.removed},
                      {"before", r.before},
                      {"after", r.after}});
  text::write_file_atomic(dir / "leakage.json", report.dump(2) + "\n");
}

ConlangBundle load_bundle(const std::filesystem::path& dir) {
  ConlangBundle b;
  try {
    b.idea = idea_from_json(json::parse(text::read_file(dir / "idea.json")));
  } catch (const json::exception& e) {
    throw ParseError((dir / "idea.json").string() + ": " + e.what());
  }
  b.conculture = text::read_file(dir / "conculture.txt");
  b.conlang_definition = text::read_file(dir / "conlang.txt");
  b.additional_vocabulary = text::read_file(dir / "additional_vocabulary.txt");
  const auto corpus = load_corpus(dir / "texts.corpus");
  for (const auto& doc : corpus.documents) {
    const auto* ref = corpus.reference(doc.doc_id);
    if (!ref) throw ValidationError("bundle text " + doc.doc_id + " has no English reference");
    b.texts.push_back({doc.segments, ref->segments});
  }
  return b;
}

ConlangContext conlang_context(const ConlangBundle& bundle) {
  return {bundle.idea.language, bundle.idea.species, bundle.idea.planet, bundle.conculture, bundle.conlang_definition};
}

}  // namespace shuffleval
