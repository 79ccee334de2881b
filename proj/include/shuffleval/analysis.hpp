#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shuffleval/corpus.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/scorer.hpp"

namespace shuffleval {

class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

// Sample Pearson coefficient. Sizes must match and be >= 2 (ArgumentError);
// a constant input throws UndefinedCorrelation.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct ConfidenceInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  std::size_t n_resamples = 0;
  std::size_t n_degenerate = 0;  // resamples redrawn because r was undefined

  double half_width() const noexcept { return (high - low) / 2.0; }
};

inline constexpr std::size_t kDefaultBootstrapResamples = 10000;

// Percentile bootstrap over resampled (x, y) pairs. Resample i uses a seed
// derived from (seed, i); a resample with constant x or y is discarded and
// redrawn from the next derived seed, so exactly n_resamples coefficients
// enter the percentiles. Deterministic for any thread count.
ConfidenceInterval bootstrap_ci(std::span<const double> xs, std::span<const double> ys,
                                std::size_t n_resamples = kDefaultBootstrapResamples, double level = 0.95,
                                std::uint64_t seed = 0, std::size_t threads = 1);

struct ScoreRow {
  std::string doc_id;
  std::string language;
  std::string translator_id;
  double shuffleval = 0.0;  // [0, 1]
  double baseline = 0.0;    // [0, 100]
  bool flagged = false;     // either metric carried failure flags
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  // (doc_id, translator_id) keys that appeared under only one metric.
  std::vector<std::string> orphans;
};

// Joins shuffleval and baseline records on (doc_id, translator_id); language
// comes from the corpus (unknown docs get "unknown").
ScoreTable build_score_table(const std::vector<ScoreRecord>& records, const ParallelCorpus* corpus);

enum class GroupBy { row, translator, language };

std::string_view to_string(GroupBy g);
GroupBy parse_group_by(std::string_view s);

struct GroupMean {
  std::string key;
  double mean_shuffleval = 0.0;
  double mean_baseline = 0.0;
  std::size_t n = 0;
};

// Arithmetic means per group, groups in key order. GroupBy::row yields one
// group per row keyed "doc_id/translator_id". Empty table -> ArgumentError.
std::vector<GroupMean> aggregate(const ScoreTable& table, GroupBy by);

struct CorrelationSummary {
  GroupBy level = GroupBy::row;
  std::size_t n_points = 0;
  std::optional<double> r;
  std::optional<ConfidenceInterval> ci;
  std::string note;  // why r or ci is missing
  std::vector<GroupMean> groups;
};

struct ReportOptions {
  std::size_t n_resamples = kDefaultBootstrapResamples;
  double level = 0.95;
  std::uint64_t seed = 0;
  bool strict = false;  // drop flagged rows
  std::size_t threads = 1;
  std::vector<GroupBy> levels{GroupBy::row, GroupBy::translator, GroupBy::language};
};

struct AnalysisReport {
  std::size_t n_rows = 0;
  std::size_t n_flagged = 0;
  std::size_t n_dropped = 0;
  std::vector<CorrelationSummary> levels;
  std::vector<std::string> orphans;
};

AnalysisReport analyze(const ScoreTable& table, const ReportOptions& options);

// Writes report.jsonl, summary.txt and one CSV per level
// (rows.csv / by_translator.csv / by_language.csv).
void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir);
std::string render_summary(const AnalysisReport& report);

struct RfqeScore {
  std::string doc_id;
  std::string translator_id;
  int score = 0;  // 0..100
};

struct HallucinationReport {
  int threshold = 90;
  int floor = 0;
  std::size_t n_total = 0;
  std::size_t n_selected = 0;          // rfqe >= threshold and matched to a baseline
  std::vector<int> selected_baseline;  // baseline scores of the selected rows, sorted
  std::optional<double> flagged_fraction;  // share of selected with baseline <= floor
  std::vector<std::string> orphans;        // keys present on only one side
};

HallucinationReport hallucination_screen(const std::vector<RfqeScore>& rfqe, const std::vector<BaselineResult>& baseline,
                                         int threshold = 90, int floor = 0);

}  // namespace shuffleval
