#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shuffleval/backend.hpp"
#include "shuffleval/corpus.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/judge.hpp"
#include "shuffleval/permute.hpp"

namespace shuffleval {

enum class ScoreMode { exact, monte_carlo };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view s);

inline constexpr std::size_t kDefaultPermutationSamples = 10;

struct PermutationVerdict {
  SegmentPermutation permutation;
  JudgeVerdict verdict;
};

struct ShufflEvalResult {
  std::string doc_id;
  std::string translator_id;
  // Fraction of comparisons preferring the original order; loss = 1 - score.
  double score = 0.0;
  ScoreMode mode = ScoreMode::monte_carlo;
  std::size_t n_permutations = 0;
  std::vector<PermutationVerdict> verdicts;
  std::optional<std::uint64_t> seed;  // monte_carlo only
  std::vector<std::string> flags;

  double loss() const noexcept { return 1.0 - score; }
};

struct ShufflEvalOptions {
  ScoreMode mode = ScoreMode::monte_carlo;
  std::size_t n_samples = kDefaultPermutationSamples;
  std::uint64_t seed = 0;
  std::string source_description = std::string(kDefaultSourceDescription);
};

// Thrown when the backend gives out mid-document; carries what was judged.
class PartialScoreError : public TransportError {
 public:
  PartialScoreError(const std::string& what, ShufflEvalResult partial)
      : TransportError(what), partial_(std::move(partial)) {}
  const ShufflEvalResult& partial() const noexcept { return partial_; }

 private:
  ShufflEvalResult partial_;
};

// Judges the translation's order against k!-1 (exact) or n_samples sampled
// (monte_carlo) permutations of its own segments.
// k < 2 -> ArgumentError; exact with k above the enumeration ceiling -> CapacityError.
ShufflEvalResult shuffleval_score(const SegmentedTranslation& translation, Client& client,
                                  const ShufflEvalOptions& options = {});

struct BaselineResult {
  std::string doc_id;
  std::string translator_id;
  int score = 0;  // [0, 100]
  std::string raw_reply;
  bool clamped = false;
  std::vector<std::string> flags;
};

std::string render_baseline_prompt(const SegmentedTranslation& reference, const SegmentedTranslation& candidate);

// Optional sign plus digits, surrounding whitespace ignored.
std::optional<long long> parse_integer_reply(std::string_view reply);

// Single judged call. Non-integer after retries -> ScoringError (no fallback);
// out-of-range integers are clamped and flagged.
BaselineResult baseline_score(const SegmentedTranslation& reference, const SegmentedTranslation& candidate,
                              Client& client);

// Line-delimited result records.
std::string to_record(const ShufflEvalResult& r);
std::string to_record(const BaselineResult& r);

struct ScoreRecord {
  std::string doc_id;
  std::string translator_id;
  std::string metric;  // "shuffleval" | "baseline"
  double score = 0.0;
  std::vector<std::string> flags;
};

std::vector<ScoreRecord> parse_score_records(std::string_view content);

}  // namespace shuffleval
