#include "shuffleval/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "shuffleval/parallel.hpp"
#include "shuffleval/rng.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

namespace {

std::optional<double> pearson_of(std::span<const double> xs, std::span<const double> ys,
                                 const std::vector<std::size_t>* idx) {
  const std::size_t n = idx ? idx->size() : xs.size();
  auto x = [&](std::size_t i) { return xs[idx ? (*idx)[i] : i]; };
  auto y = [&](std::size_t i) { return ys[idx ? (*idx)[i] : i]; };
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x(i);
    my += y(i);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x(i) - mx, dy = y(i) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string row_key(const std::string& doc, const std::string& translator) { return doc + "/" + translator; }

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ArgumentError("pearson: sequences differ in length");
  if (xs.size() < 2) throw ArgumentError("pearson: need at least 2 points");
  auto r = pearson_of(xs, ys, nullptr);
  if (!r) throw UndefinedCorrelation("pearson: correlation undefined for a constant sequence");
  return *r;
}

ConfidenceInterval bootstrap_ci(std::span<const double> xs, std::span<const double> ys, std::size_t n_resamples,
                                double level, std::uint64_t seed, std::size_t threads) {
  if (n_resamples < 100) throw ArgumentError("bootstrap_ci: n_resamples must be >= 100");
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("bootstrap_ci: level must lie in (0, 1)");
  ConfidenceInterval ci;
  ci.estimate = pearson(xs, ys);
  ci.level = level;
  ci.n_resamples = n_resamples;

  constexpr std::size_t kMaxRedraws = 1000;
  const std::size_t n = xs.size();
  std::vector<double> rs(n_resamples);
  std::vector<std::size_t> redraws(n_resamples, 0);
  parallel_for(n_resamples, threads, [&](std::size_t i) {
    const auto stream = derive_seed(seed, i);
    std::vector<std::size_t> idx(n);
    for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
      Rng rng(derive_seed(stream, attempt));
      for (auto& j : idx) j = uniform_index(rng, n);
      if (auto r = pearson_of(xs, ys, &idx)) {
        rs[i] = *r;
        redraws[i] = attempt;
        return;
      }
    }
    throw UndefinedCorrelation("bootstrap_ci: every redraw of resample " + std::to_string(i) + " was degenerate");
  });
  for (auto r : redraws) ci.n_degenerate += r;
  std::sort(rs.begin(), rs.end());
  const double alpha = (1.0 - level) / 2.0;
  ci.low = quantile_sorted(rs, alpha);
  ci.high = quantile_sorted(rs, 1.0 - alpha);
  return ci;
}

ScoreTable build_score_table(const std::vector<ScoreRecord>& records, const ParallelCorpus* corpus) {
  struct Cell {
    std::optional<double> shuffle, base;
    bool flagged = false;
    std::string doc_id, translator_id;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  for (const auto& r : records) {
    auto& c = cells[{r.doc_id, r.translator_id}];
    c.doc_id = r.doc_id;
    c.translator_id = r.translator_id;
    if (r.metric == "shuffleval") c.shuffle = r.score;
    else c.base = r.score;
    if (!r.flags.empty()) c.flagged = true;
  }
  ScoreTable table;
  for (const auto& [key, c] : cells) {
    if (!c.shuffle || !c.base) {
      table.orphans.push_back(row_key(c.doc_id, c.translator_id));
      continue;
    }
    ScoreRow row{c.doc_id, "unknown", c.translator_id, *c.shuffle, *c.base, c.flagged};
    if (corpus)
      if (const auto* d = corpus->find(c.doc_id)) row.language = d->language;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::row: return "row";
    case GroupBy::translator: return "translator";
    case GroupBy::language: return "language";
  }
  return "row";
}

GroupBy parse_group_by(std::string_view s) {
  if (s == "row") return GroupBy::row;
  if (s == "translator") return GroupBy::translator;
  if (s == "language") return GroupBy::language;
  throw ArgumentError("unknown group-by \"" + std::string(s) + "\"");
}

std::vector<GroupMean> aggregate(const ScoreTable& table, GroupBy by) {
  if (table.rows.empty()) throw ArgumentError("aggregate: empty score table");
  std::map<std::string, GroupMean> groups;
  for (const auto& row : table.rows) {
    const std::string key = by == GroupBy::translator ? row.translator_id
                            : by == GroupBy::language ? row.language
                                                      : row_key(row.doc_id, row.translator_id);
    auto& g = groups[key];
    g.key = key;
    g.mean_shuffleval += row.shuffleval;
    g.mean_baseline += row.baseline;
    ++g.n;
  }
  std::vector<GroupMean> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    g.mean_shuffleval /= static_cast<double>(g.n);
    g.mean_baseline /= static_cast<double>(g.n);
    out.push_back(std::move(g));
  }
  return out;
}

AnalysisReport analyze(const ScoreTable& table, const ReportOptions& options) {
  AnalysisReport report;
  report.orphans = table.orphans;
  ScoreTable used;
  for (const auto& row : table.rows) {
    if (row.flagged) ++report.n_flagged;
    if (options.strict && row.flagged) {
      ++report.n_dropped;
      continue;
    }
    used.rows.push_back(row);
  }
  report.n_rows = used.rows.size();
  if (used.rows.empty()) throw ArgumentError("analyze: no complete score rows");
  for (auto level : options.levels) {
    CorrelationSummary s;
    s.level = level;
    s.groups = aggregate(used, level);
    s.n_points = s.groups.size();
    std::vector<double> xs, ys;
    for (const auto& g : s.groups) {
      xs.push_back(g.mean_shuffleval);
      ys.push_back(g.mean_baseline);
    }
    if (s.n_points < 2) {
      s.note = "fewer than 2 points";
    } else {
      try {
        s.r = pearson(xs, ys);
        s.ci = bootstrap_ci(xs, ys, options.n_resamples, options.level, options.seed, options.threads);
      } catch (const UndefinedCorrelation& e) {
        s.note = e.what();
      }
    }
    report.levels.push_back(std::move(s));
  }
  return report;
}

std::string render_summary(const AnalysisReport& report) {
  std::ostringstream out;
  out << "rows: " << report.n_rows << " (flagged " << report.n_flagged << ", dropped " << report.n_dropped << ")\n";
  if (!report.orphans.empty()) out << "orphaned keys: " << report.orphans.size() << "\n";
  for (const auto& s : report.levels) {
    out << to_string(s.level) << ": n=" << s.n_points;
    if (s.r) {
      out << " r=" << fmt(*s.r);
      if (s.ci)
        out << " " << fmt(s.ci->level * 100) << "% CI [" << fmt(s.ci->low) << ", " << fmt(s.ci->high)
            << "] (+/-" << fmt(s.ci->half_width()) << ")";
    }
    if (!s.note.empty()) out << " (" << s.note << ")";
    out << "\n";
  }
  return out.str();
}

void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string jsonl;
  for (const auto& s : report.levels) {
    json rec = {{"kind", "correlation"},
                {"level", std::string(to_string(s.level))},
                {"n_points", s.n_points},
                {"r", s.r ? json(*s.r) : json(nullptr)},
                {"ci_low", s.ci ? json(s.ci->low) : json(nullptr)},
                {"ci_high", s.ci ? json(s.ci->high) : json(nullptr)},
                {"ci_level", s.ci ? json(s.ci->level) : json(nullptr)},
                {"n_resamples", s.ci ? json(s.ci->n_resamples) : json(nullptr)},
                {"note", s.note}};
    jsonl += rec.dump() + "\n";
    std::string csv = "key,mean_shuffleval,mean_baseline,n\n";
    for (const auto& g : s.groups) {
      jsonl += json{{"kind", "group"},
                    {"level", std::string(to_string(s.level))},
                    {"key", g.key},
                    {"mean_shuffleval", g.mean_shuffleval},
                    {"mean_baseline", g.mean_baseline},
                    {"n", g.n}}
                   .dump() +
               "\n";
      csv += csv_field(g.key) + "," + fmt(g.mean_shuffleval) + "," + fmt(g.mean_baseline) + "," +
             std::to_string(g.n) + "\n";
    }
    const std::string name = s.level == GroupBy::row          ? "rows.csv"
                             : s.level == GroupBy::translator ? "by_translator.csv"
                                                              : "by_language.csv";
    text::write_file_atomic(out_dir / name, csv);
  }
  for (const auto& o : report.orphans) jsonl += json{{"kind", "orphan"}, {"key", o}}.dump() + "\n";
  text::write_file_atomic(out_dir / "report.jsonl", jsonl);
  text::write_file_atomic(out_dir / "summary.txt", render_summary(report));
}

HallucinationReport hallucination_screen(const std::vector<RfqeScore>& rfqe, const std::vector<BaselineResult>& baseline,
                                         int threshold, int floor) {
  HallucinationReport rep;
  rep.threshold = threshold;
  rep.floor = floor;
  std::map<std::string, int> base;
  for (const auto& b : baseline) base[row_key(b.doc_id, b.translator_id)] = b.score;
  std::map<std::string, bool> matched;
  std::size_t at_floor = 0;
  for (const auto& r : rfqe) {
    const auto key = row_key(r.doc_id, r.translator_id);
    auto it = base.find(key);
    if (it == base.end()) {
      rep.orphans.push_back(key);
      continue;
    }
    matched[key] = true;
    ++rep.n_total;
    if (r.score >= threshold) {
      ++rep.n_selected;
      rep.selected_baseline.push_back(it->second);
      if (it->second <= floor) ++at_floor;
    }
  }
  for (const auto& [key, score] : base)
    if (!matched.count(key)) rep.orphans.push_back(key);
  std::sort(rep.selected_baseline.begin(), rep.selected_baseline.end());
  if (rep.n_selected) rep.flagged_fraction = static_cast<double>(at_floor) / static_cast<double>(rep.n_selected);
  return rep;
}

}  // namespace shuffleval
