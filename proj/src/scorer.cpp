#include "shuffleval/scorer.hpp"

#include <algorithm>
#include <charconv>

#include "json.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

namespace {

constexpr std::string_view kBaselineTemplate =
    "Score the following translation on a continuous scale 0 to 100 where score of zero means "
    "\"no meaning preserved\" and score of one hundred means \"perfect meaning and grammar\".\n"
    "\n"
    "<HUMAN_REFERENCE>\n"
    "{target}\n"
    "</HUMAN_REFERENCE>\n"
    "\n"
    "<MACHINE_TRANSLATION>\n"
    "{translation}\n"
    "</MACHINE_TRANSLATION>\n"
    "\n"
    "Just output an integer score between 0 and 100, inclusive, and nothing else.";

std::string join_nonempty(const std::vector<std::string>& segments) {
  std::vector<std::string> kept;
  for (const auto& s : segments)
    if (!text::trim(s).empty()) kept.push_back(s);
  return text::join(kept, "\n\n");
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n"; }

}  // namespace

std::string_view to_string(ScoreMode mode) { return mode == ScoreMode::exact ? "exact" : "monte_carlo"; }

ScoreMode parse_score_mode(std::string_view s) {
  if (s == "exact") return ScoreMode::exact;
  if (s == "monte_carlo") return ScoreMode::monte_carlo;
  throw ArgumentError("unknown score mode \"" + std::string(s) + "\"");
}

ShufflEvalResult shuffleval_score(const SegmentedTranslation& translation, Client& client,
                                  const ShufflEvalOptions& options) {
  const auto k = translation.segments.size();
  if (k < 2) throw ArgumentError("ShufflEval undefined for single-segment documents");
  ShufflEvalResult result;
  result.doc_id = translation.doc_id;
  result.translator_id = translation.translator_id;
  result.mode = options.mode;

  std::vector<SegmentPermutation> perms;
  if (options.mode == ScoreMode::exact) {
    perms = enumerate_nonidentity(k);
  } else {
    if (options.n_samples == 0) throw ArgumentError("monte_carlo mode needs n_samples >= 1");
    perms = sample_nonidentity(k, options.n_samples, options.seed);
    result.seed = options.seed;
  }
  result.n_permutations = perms.size();
  result.verdicts.reserve(perms.size());

  double sum = 0;
  std::size_t flagged = 0;
  for (auto& perm : perms) {
    OrderingPair pair{translation.segments, apply_permutation(perm, translation.segments), options.source_description};
    JudgeVerdict v;
    try {
      v = judge_pair(pair, client);
    } catch (const TransportError& e) {
      result.score = result.verdicts.empty() ? 0.0 : sum / static_cast<double>(result.verdicts.size());
      result.flags.push_back("incomplete: " + std::string(e.what()));
      throw PartialScoreError(e.what(), std::move(result));
    }
    sum += v.preference;
    if (v.flagged()) ++flagged;
    result.verdicts.push_back({std::move(perm), std::move(v)});
  }
  result.score = sum / static_cast<double>(result.verdicts.size());
  if (flagged)
    result.flags.push_back("unparseable judge replies in " + std::to_string(flagged) + " of " +
                           std::to_string(result.verdicts.size()) + " comparisons");
  if (!translation.flags.empty())
    result.flags.push_back("translation has " + std::to_string(translation.flags.size()) + " failed segments");
  return result;
}

std::string render_baseline_prompt(const SegmentedTranslation& reference, const SegmentedTranslation& candidate) {
  if (reference.doc_id != candidate.doc_id)
    throw ArgumentError("baseline: reference " + reference.doc_id + " does not match candidate " + candidate.doc_id);
  return text::fill(kBaselineTemplate,
                    {{"target", join_nonempty(reference.segments)}, {"translation", join_nonempty(candidate.segments)}});
}

std::optional<long long> parse_integer_reply(std::string_view reply) {
  auto t = text::trim(reply);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc::result_out_of_range && ptr == t.data() + t.size())
    return t.front() == '-' ? -1 : 1000;  // clamps the same way
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

BaselineResult baseline_score(const SegmentedTranslation& reference, const SegmentedTranslation& candidate,
                              Client& client) {
  const auto prompt = render_baseline_prompt(reference, candidate);
  BaselineResult r;
  r.doc_id = candidate.doc_id;
  r.translator_id = candidate.translator_id;
  const int max_attempts = client.config().max_retries + 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    r.raw_reply = client.complete(prompt, attempt);
    if (auto v = parse_integer_reply(r.raw_reply)) {
      if (*v < 0 || *v > 100) {
        r.clamped = true;
        r.flags.push_back("clamped out-of-range score " + std::string(text::trim(r.raw_reply)));
      }
      r.score = static_cast<int>(std::clamp<long long>(*v, 0, 100));
      if (!candidate.flags.empty())
        r.flags.push_back("translation has " + std::to_string(candidate.flags.size()) + " failed segments");
      return r;
    }
  }
  throw ScoringError("baseline reply for " + candidate.doc_id + "/" + candidate.translator_id +
                     " is not an integer: \"" + r.raw_reply.substr(0, 80) + "\"");
}

std::string to_record(const ShufflEvalResult& r) {
  json perms = json::array();
  json prefs = json::array();
  for (const auto& pv : r.verdicts) {
    perms.push_back(pv.permutation.mapping());
    prefs.push_back(pv.verdict.preference);
  }
  return dump_line({{"doc_id", r.doc_id},
                    {"translator_id", r.translator_id},
                    {"metric", "shuffleval"},
                    {"score", r.score},
                    {"mode", std::string(to_string(r.mode))},
                    {"n_permutations", r.n_permutations},
                    {"seed", r.seed ? json(*r.seed) : json(nullptr)},
                    {"permutations", perms},
                    {"preferences", prefs},
                    {"flags", r.flags}});
}

std::string to_record(const BaselineResult& r) {
  return dump_line({{"doc_id", r.doc_id},
                    {"translator_id", r.translator_id},
                    {"metric", "baseline"},
                    {"score", r.score},
                    {"mode", nullptr},
                    {"n_permutations", nullptr},
                    {"seed", nullptr},
                    {"raw_reply", r.raw_reply},
                    {"flags", r.flags}});
}

std::vector<ScoreRecord> parse_score_records(std::string_view content) {
  std::vector<ScoreRecord> out;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, "\n")) {
    ++line_no;
    if (text::trim(raw).empty()) continue;
    try {
      const auto j = json::parse(raw);
      ScoreRecord r;
      r.doc_id = j.at("doc_id").get<std::string>();
      r.translator_id = j.at("translator_id").get<std::string>();
      r.metric = j.at("metric").get<std::string>();
      if (r.metric != "shuffleval" && r.metric != "baseline") throw ParseError("unknown metric " + r.metric, line_no);
      r.score = j.at("score").get<double>();
      if (j.contains("flags")) r.flags = j["flags"].get<std::vector<std::string>>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad score record: ") + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace shuffleval
