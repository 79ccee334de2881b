#include "shuffleval/judge.hpp"

#include <algorithm>

#include "shuffleval/errors.hpp"
#include "shuffleval/permute.hpp"
#include "shuffleval/rng.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {
namespace {

constexpr std::string_view kShuffleTemplate =
    "We have a (possibly poor) English translation of {source_description}, broken into segments. "
    "To make matters worse, we are not certain what order the segments should be in.\n"
    "\n"
    "Below are two orderings of the segments.\n"
    "Decide which ordering reads more natural and coherent.\n"
    "Reply with '1' or '2' only.\n"
    "\n"
    "<ORDERING1>\n"
    "{text1}\n"
    "</ORDERING1>\n"
    "\n"
    "<ORDERING2>\n"
    "{text2}\n"
    "</ORDERING2>";

JudgeCall run_call(const OrderingPair& pair, bool original_first, Client& client) {
  const auto prompt = render_shuffle_prompt(pair, original_first);
  JudgeCall call;
  call.original_first = original_first;
  const int max_attempts = client.config().max_retries + 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    call.raw_reply = client.complete(prompt, attempt);
    call.attempts = attempt + 1;
    if (auto c = parse_choice(call.raw_reply)) {
      call.choice = *c;
      const bool chose_original = (*c == 1) == original_first;
      call.indicator = chose_original ? 1.0 : 0.0;
      return call;
    }
  }
  call.parse_failed = true;
  call.indicator = 0.5;
  return call;
}

}  // namespace

void OrderingPair::validate() const {
  if (original.size() < 2) throw ArgumentError("ordering pair needs at least 2 segments");
  if (original.size() != permuted.size()) throw ArgumentError("orderings differ in length");
  auto a = original, b = permuted;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ArgumentError("orderings are not permutations of each other");
}

std::string join_segments(const std::vector<std::string>& segments) { return text::join(segments, "\n\n"); }

std::string render_shuffle_prompt(const OrderingPair& pair, bool first_is_original) {
  const auto& first = first_is_original ? pair.original : pair.permuted;
  const auto& second = first_is_original ? pair.permuted : pair.original;
  return text::fill(kShuffleTemplate, {{"source_description", pair.source_description},
                                       {"text1", join_segments(first)},
                                       {"text2", join_segments(second)}});
}

std::optional<int> parse_choice(std::string_view reply) {
  const auto t = text::trim(reply);
  if (t == "1") return 1;
  if (t == "2") return 2;
  return std::nullopt;
}

JudgeVerdict judge_pair(const OrderingPair& pair, Client& client) {
  pair.validate();
  JudgeVerdict v;
  v.calls[0] = run_call(pair, true, client);
  v.calls[1] = run_call(pair, false, client);
  v.preference = (v.calls[0].indicator + v.calls[1].indicator) / 2.0;
  return v;
}

JudgeVerdict judge_pair(const OrderingPair& pair, const BackendConfig& cfg) {
  auto client = make_client(cfg);
  return judge_pair(pair, *client);
}

int oracle_judge(const std::vector<std::string>& ordering1, const std::vector<std::string>& ordering2,
                 const CoherenceFn& coherence) {
  return coherence(ordering1) >= coherence(ordering2) ? 1 : 2;
}

std::optional<long long> first_integer_tag(std::string_view segment) {
  const auto b = segment.find_first_of("0123456789");
  if (b == std::string_view::npos) return std::nullopt;
  long long v = 0;
  for (std::size_t i = b; i < segment.size() && segment[i] >= '0' && segment[i] <= '9'; ++i) {
    if (v > (1LL << 58)) break;
    v = v * 10 + (segment[i] - '0');
  }
  return v;
}

double ascending_tag_coherence(const std::vector<std::string>& segments) {
  double n = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    auto a = first_integer_tag(segments[i]);
    auto b = first_integer_tag(segments[i + 1]);
    if (a && b && *a < *b) n += 1;
  }
  return n;
}

ProbeResult judge_accuracy_probe(const std::vector<SegmentedDocument>& documents, Client& client,
                                 std::size_t n_perms, std::uint64_t seed, double bias_threshold,
                                 std::string_view source_description) {
  if (n_perms == 0) throw ArgumentError("judge_accuracy_probe: n_perms must be >= 1");
  ProbeResult r;
  double pref_sum = 0;
  std::size_t parsed = 0, ones = 0;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const auto& doc = documents[d];
    if (doc.k() < 2) throw ArgumentError("judge_accuracy_probe: document " + doc.doc_id + " has k < 2");
    for (const auto& perm : sample_nonidentity(doc.k(), n_perms, derive_seed(seed, d))) {
      OrderingPair pair{doc.segments, apply_permutation(perm, doc.segments), std::string(source_description)};
      const auto v = judge_pair(pair, client);
      pref_sum += v.preference;
      ++r.n_pairs;
      for (const auto& c : v.calls) {
        if (c.parse_failed) {
          ++r.flagged_calls;
        } else {
          ++parsed;
          if (c.choice == 1) ++ones;
        }
      }
    }
  }
  r.accuracy = r.n_pairs ? pref_sum / static_cast<double>(r.n_pairs) : 0.0;
  r.first_slot_rate = parsed ? static_cast<double>(ones) / static_cast<double>(parsed) : 0.0;
  r.bias_warning = parsed > 0 && (r.first_slot_rate >= bias_threshold || r.first_slot_rate <= 1.0 - bias_threshold);
  return r;
}

}  // namespace shuffleval
