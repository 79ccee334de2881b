#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shuffleval/backend.hpp"
#include "shuffleval/corpus.hpp"

namespace shuffleval {

inline constexpr std::string_view kDefaultSourceDescription = "a Wikipedia article";
inline constexpr double kDefaultBiasThreshold = 0.95;

// Two orderings of the same target segments.
struct OrderingPair {
  std::vector<std::string> original;
  std::vector<std::string> permuted;
  std::string source_description = std::string(kDefaultSourceDescription);

  // Equal length >= 2 and equal multisets, else ArgumentError.
  void validate() const;
};

// Segments one per line with a blank line between them.
std::string join_segments(const std::vector<std::string>& segments);

// The shuffle-test prompt; the original fills <ORDERING1> iff first_is_original.
std::string render_shuffle_prompt(const OrderingPair& pair, bool first_is_original);

// Trimmed reply must be exactly "1" or "2".
std::optional<int> parse_choice(std::string_view reply);

struct JudgeCall {
  bool original_first = true;
  std::string raw_reply;  // last reply received
  int choice = 0;         // 1 or 2; 0 when every attempt was unparseable
  int attempts = 0;
  bool parse_failed = false;
  // 1 if the original was chosen, 0 if the permutation was, 0.5 on failure.
  double indicator = 0.5;
};

struct JudgeVerdict {
  // Mean of the two call indicators: {0, 0.5, 1} for clean verdicts,
  // possibly 0.25/0.75 when a call fell back to 0.5.
  double preference = 0.5;
  std::array<JudgeCall, 2> calls;

  bool flagged() const noexcept { return calls[0].parse_failed || calls[1].parse_failed; }
};

// Two judgments with slots swapped (original first, then permuted first),
// each retried up to max_retries times on an unparseable reply.
JudgeVerdict judge_pair(const OrderingPair& pair, Client& client);
JudgeVerdict judge_pair(const OrderingPair& pair, const BackendConfig& cfg);

using CoherenceFn = std::function<double(const std::vector<std::string>&)>;

// 1 iff coherence(ordering1) > coherence(ordering2); ties go to slot 1.
int oracle_judge(const std::vector<std::string>& ordering1, const std::vector<std::string>& ordering2,
                 const CoherenceFn& coherence);

// First run of decimal digits in a segment, if any.
std::optional<long long> first_integer_tag(std::string_view segment);

// Number of adjacent pairs whose tags strictly ascend; untagged segments
// never form an ascending pair.
double ascending_tag_coherence(const std::vector<std::string>& segments);

struct ProbeResult {
  double accuracy = 0.0;         // mean preference over all probe pairs
  double first_slot_rate = 0.0;  // fraction of parsed calls answering "1"
  std::size_t n_pairs = 0;
  std::size_t flagged_calls = 0;
  bool bias_warning = false;     // first_slot_rate outside [1-t, t]
};

// Judges each document's original order against n_perms sampled
// permutations of its own segments (no translation involved).
ProbeResult judge_accuracy_probe(const std::vector<SegmentedDocument>& documents, Client& client,
                                 std::size_t n_perms, std::uint64_t seed,
                                 double bias_threshold = kDefaultBiasThreshold,
                                 std::string_view source_description = kDefaultSourceDescription);

}  // namespace shuffleval
