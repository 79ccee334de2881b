#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shuffleval/analysis.hpp"
#include "shuffleval/backend.hpp"
#include "shuffleval/conlang.hpp"
#include "shuffleval/corpus.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/judge.hpp"
#include "shuffleval/manifest.hpp"
#include "shuffleval/parallel.hpp"
#include "shuffleval/rng.hpp"
#include "shuffleval/scorer.hpp"
#include "shuffleval/text.hpp"
#include "shuffleval/theorysim.hpp"
#include "shuffleval/translator.hpp"

namespace fs = std::filesystem;
using namespace shuffleval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct BackendFlags {
  std::string endpoint;
  std::string api_key;
  std::string cache_dir = ".shuffleval-cache";
  std::string decoding_params = "{}";
  bool offline = false;
  std::size_t max_inflight = 8;
  int max_retries = 3;
  double timeout_s = 120.0;
  std::size_t threads = 0;  // CPU-bound work; 0 = hardware concurrency
};

BackendFlags g_flags;
std::vector<std::string> g_argv;

std::size_t cpu_threads() {
  if (g_flags.threads) return g_flags.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

BackendConfig backend_config(const std::string& model_id) {
  if (model_id.empty()) throw ConfigError("no model id given");
  BackendConfig cfg;
  cfg.model_id = model_id;
  cfg.kind = infer_backend_kind(model_id);
  cfg.endpoint = g_flags.endpoint;
  cfg.api_key = g_flags.api_key;
  cfg.cache_dir = g_flags.cache_dir;
  cfg.offline = g_flags.offline;
  cfg.max_inflight = g_flags.max_inflight;
  cfg.max_retries = g_flags.max_retries;
  cfg.timeout = std::chrono::milliseconds(static_cast<long long>(g_flags.timeout_s * 1000));
  try {
    cfg.decoding_params = nlohmann::json::parse(g_flags.decoding_params).dump();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("--decoding-params is not JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunManifest start_manifest(const std::string& command) {
  RunManifest m;
  m.command = command;
  m.argv = g_argv;
  m.rng_algorithm = std::string(kRngAlgorithm);
  m.started_at = utc_timestamp();
  m.config["endpoint"] = g_flags.endpoint;
  m.config["cache_dir"] = g_flags.cache_dir;
  m.config["decoding_params"] = g_flags.decoding_params;
  m.config["offline"] = g_flags.offline ? "true" : "false";
  m.config["max_inflight"] = std::to_string(g_flags.max_inflight);
  m.config["max_retries"] = std::to_string(g_flags.max_retries);
  return m;
}

void note_model(RunManifest& m, const std::string& role, const std::string& model_id) {
  m.config[role] = model_id;
  m.config[role + "_backend"] = std::string(to_string(infer_backend_kind(model_id)));
}

void finish_manifest(RunManifest& m, const fs::path& path) {
  m.finished_at = utc_timestamp();
  write_manifest(m, path);
}

fs::path sidecar(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

// Accepts "0.000416" or "1/2400".
double parse_ratio(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  } catch (const std::exception&) {
    throw ArgumentError("not a number: " + s);
  }
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- prepare ---------------------------------------------------------------

struct PrepareArgs {
  std::string corpus, out, created_after;
  std::size_t min_chars = 0, max_segments = 0;
  bool require_reference = false;
};

int cmd_prepare(const PrepareArgs& a) {
  auto manifest = start_manifest("prepare");
  manifest.add_input(a.corpus);
  const auto corpus = load_corpus(a.corpus);
  ArticleFilter filter;
  filter.min_chars = a.min_chars;
  filter.require_reference = a.require_reference;
  if (!a.created_after.empty()) {
    filter.created_after = parse_date(a.created_after);
    if (!filter.created_after) throw ArgumentError("--created-after must be YYYY-MM-DD");
  }
  auto result = filter_articles(corpus, filter);
  if (a.max_segments)
    for (auto& doc : result.corpus.documents) {
      doc = truncate_segments(doc, a.max_segments);
      if (auto it = result.corpus.references.find(doc.doc_id); it != result.corpus.references.end())
        if (it->second.segments.size() > a.max_segments) it->second.segments.resize(a.max_segments);
    }
  save_corpus(result.corpus, a.out);
  manifest.config["min_chars"] = std::to_string(a.min_chars);
  manifest.config["created_after"] = a.created_after;
  manifest.config["require_reference"] = a.require_reference ? "true" : "false";
  manifest.config["max_segments"] = std::to_string(a.max_segments);
  finish_manifest(manifest, sidecar(a.out));

  std::cout << "kept " << result.corpus.documents.size() << " of " << corpus.documents.size() << " documents\n";
  for (const auto& id : result.excluded) std::cout << "excluded " << id << "\n";
  for (const auto& issue : result.issues) std::cout << "issue " << issue.doc_id << ": " << issue.message << "\n";
  return result.issues.empty() ? kExitOk : kExitPartial;
}

// ---- probe -----------------------------------------------------------------

struct ProbeArgs {
  std::string corpus, judge_model, source_description = std::string(kDefaultSourceDescription);
  std::size_t n_perms = kDefaultPermutationSamples;
  std::uint64_t seed = 0;
  double bias_threshold = kDefaultBiasThreshold;
};

int cmd_probe(const ProbeArgs& a) {
  const auto corpus = load_corpus(a.corpus);
  auto client = make_client(backend_config(a.judge_model));
  std::vector<SegmentedDocument> docs;
  for (const auto& d : corpus.documents)
    if (d.k() >= 2) docs.push_back(d);
  const auto r = judge_accuracy_probe(docs, *client, a.n_perms, a.seed, a.bias_threshold, a.source_description);
  std::cout << "pairs " << r.n_pairs << "\naccuracy " << fmt(r.accuracy, 4) << "\nfirst_slot_rate "
            << fmt(r.first_slot_rate, 4) << "\nflagged_calls " << r.flagged_calls << "\n";
  if (r.bias_warning) std::cout << "warning: judge answers are dominated by one slot (positional bias)\n";
  return kExitOk;
}

// ---- translate -------------------------------------------------------------

struct TranslateArgs {
  std::string corpus, model, out, translator_id, source_language, conlang_dir;
  std::string template_kind = "low_resource";
  bool whole_document = false;
};

int cmd_translate(const TranslateArgs& a) {
  auto manifest = start_manifest("translate");
  manifest.add_input(a.corpus);
  note_model(manifest, "model", a.model);
  manifest.config["template"] = a.template_kind;
  manifest.config["whole_document"] = a.whole_document ? "true" : "false";

  const auto corpus = load_corpus(a.corpus);
  const auto kind = parse_template_kind(a.template_kind);
  std::optional<ConlangContext> context;
  if (kind == TemplateKind::conlang) {
    if (a.conlang_dir.empty()) throw ConfigError("--template conlang needs --conlang-dir");
    context = conlang_context(load_bundle(a.conlang_dir));
    manifest.config["conlang_dir"] = a.conlang_dir;
  }
  auto client = make_client(backend_config(a.model));

  const auto n = corpus.documents.size();
  std::vector<std::optional<SegmentedTranslation>> results(n);
  std::vector<std::string> failures(n);
  parallel_for(n, g_flags.max_inflight, [&](std::size_t i) {
    TranslationJob job{corpus.documents[i], a.model, kind, context, a.source_language};
    if (a.whole_document) job = whole_document_job(job);
    try {
      auto mt = translate_document(job, *client);
      if (!a.translator_id.empty()) mt.translator_id = a.translator_id;
      results[i] = std::move(mt);
    } catch (const TransportError& e) {
      failures[i] = e.what();
    }
  });

  std::vector<SegmentedTranslation> done;
  std::size_t flagged = 0, failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) {
      flagged += results[i]->flags.size();
      done.push_back(std::move(*results[i]));
    } else {
      ++failed;
      std::cout << "failed " << corpus.documents[i].doc_id << ": " << failures[i] << "\n";
    }
  }
  text::write_file_atomic(a.out, write_translations(done));
  finish_manifest(manifest, sidecar(a.out));
  std::cout << "translated " << done.size() << " of " << n << " documents; " << flagged << " segment flags; "
            << failed << " transport failures; " << client->backend_calls() << " backend calls, "
            << client->cache_hits() << " cache hits\n";
  return failed ? kExitPartial : kExitOk;
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string corpus, mt, out, judge_model, baseline_model;
  std::string metric = "shuffleval", mode = "monte_carlo";
  std::string source_description = std::string(kDefaultSourceDescription);
  std::size_t n_perms = kDefaultPermutationSamples;
  std::uint64_t seed = 0;
};

std::uint64_t document_seed(std::uint64_t seed, const SegmentedTranslation& mt) {
  std::string key = mt.doc_id;
  key.push_back('\0');
  key += mt.translator_id;
  return derive_seed(seed, fnv1a64(key));
}

int cmd_score(const ScoreArgs& a) {
  if (a.metric != "shuffleval" && a.metric != "baseline" && a.metric != "both")
    throw ArgumentError("--metric must be shuffleval, baseline or both");
  const bool want_shuffle = a.metric != "baseline";
  const bool want_baseline = a.metric != "shuffleval";

  auto manifest = start_manifest("score");
  manifest.add_input(a.corpus);
  manifest.add_input(a.mt);
  manifest.config["metric"] = a.metric;
  manifest.config["mode"] = a.mode;
  manifest.config["n_perms"] = std::to_string(a.n_perms);
  manifest.config["source_description"] = a.source_description;
  manifest.seeds["seed"] = a.seed;

  const auto corpus = load_corpus(a.corpus);
  const auto mts = load_translations(a.mt);
  const auto baseline_model = a.baseline_model.empty() ? a.judge_model : a.baseline_model;
  if (want_baseline && corpus.references.empty())
    throw ConfigError("--metric " + a.metric + " needs reference translations in the corpus");

  std::shared_ptr<Client> judge, scorer;
  if (want_shuffle) {
    note_model(manifest, "judge_model", a.judge_model);
    judge = make_client(backend_config(a.judge_model));
  }
  if (want_baseline) {
    note_model(manifest, "baseline_model", baseline_model);
    scorer = make_client(backend_config(baseline_model));
  }

  ShufflEvalOptions base_opts;
  base_opts.mode = parse_score_mode(a.mode);
  base_opts.n_samples = a.n_perms;
  base_opts.source_description = a.source_description;

  const auto n = mts.size();
  std::vector<std::string> problems(n), skips(n), shuffle_records(n), baseline_records(n);
  std::vector<std::string> shuffle_errors(n), baseline_errors(n);
  parallel_for(n, g_flags.max_inflight, [&](std::size_t i) {
    const auto& mt = mts[i];
    const auto* doc = corpus.find(mt.doc_id);
    if (!doc) {
      problems[i] = "not in corpus";
      return;
    }
    if (mt.segments.size() != doc->k()) {
      problems[i] = std::to_string(mt.segments.size()) + " segments vs " + std::to_string(doc->k()) + " in source";
      return;
    }
    if (want_shuffle) {
      if (mt.segments.size() < 2) {
        skips[i] = "single segment, ShufflEval undefined";
      } else {
        auto opts = base_opts;
        opts.seed = document_seed(a.seed, mt);
        try {
          shuffle_records[i] = to_record(shuffleval_score(mt, *judge, opts));
        } catch (const PartialScoreError& e) {
          shuffle_records[i] = to_record(e.partial());
          shuffle_errors[i] = e.what();
        }
      }
    }
    if (want_baseline) {
      const auto* ref = corpus.reference(mt.doc_id);
      if (!ref) {
        baseline_errors[i] = "no reference translation";
        return;
      }
      try {
        baseline_records[i] = to_record(baseline_score(*ref, mt, *scorer));
      } catch (const ScoringError& e) {
        baseline_errors[i] = e.what();
      } catch (const TransportError& e) {
        baseline_errors[i] = e.what();
      }
    }
  });

  std::string out;
  for (const auto& r : shuffle_records) out += r;
  for (const auto& r : baseline_records) out += r;
  text::write_file_atomic(a.out, out);
  finish_manifest(manifest, sidecar(a.out));

  bool partial = false;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto key = mts[i].doc_id + "/" + mts[i].translator_id;
    if (!problems[i].empty()) {
      std::cout << "misaligned " << key << ": " << problems[i] << "\n";
      partial = true;
    }
    if (!skips[i].empty()) std::cout << "skipped " << key << ": " << skips[i] << "\n";
    if (!shuffle_errors[i].empty()) {
      std::cout << "shuffleval error " << key << ": " << shuffle_errors[i] << "\n";
      partial = true;
    }
    if (!baseline_errors[i].empty()) {
      std::cout << "baseline error " << key << ": " << baseline_errors[i] << "\n";
      partial = true;
    }
    scored += !shuffle_records[i].empty() || !baseline_records[i].empty();
  }
  std::cout << "scored " << scored << " of " << n << " translations\n";
  return partial ? kExitPartial : kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> scores, group_by;
  std::string corpus, out;
  std::size_t resamples = kDefaultBootstrapResamples;
  double level = 0.95;
  std::uint64_t seed = 0;
  bool strict = false;
};

int cmd_report(const ReportArgs& a) {
  auto manifest = start_manifest("report");
  std::vector<ScoreRecord> records;
  for (const auto& path : a.scores) {
    manifest.add_input(path);
    auto part = parse_score_records(text::read_file(path));
    records.insert(records.end(), part.begin(), part.end());
  }
  std::optional<ParallelCorpus> corpus;
  if (!a.corpus.empty()) {
    manifest.add_input(a.corpus);
    corpus = load_corpus(a.corpus);
  }
  const auto table = build_score_table(records, corpus ? &*corpus : nullptr);
  if (table.rows.empty()) throw ArgumentError("no rows with both shuffleval and baseline scores");

  ReportOptions opts;
  opts.n_resamples = a.resamples;
  opts.level = a.level;
  opts.seed = a.seed;
  opts.strict = a.strict;
  opts.threads = cpu_threads();
  if (!a.group_by.empty()) {
    opts.levels.clear();
    for (const auto& g : a.group_by) opts.levels.push_back(parse_group_by(g));
  }
  const auto report = analyze(table, opts);
  write_report(report, a.out);

  manifest.seeds["bootstrap"] = a.seed;
  manifest.config["bootstrap_resamples"] = std::to_string(a.resamples);
  manifest.config["level"] = fmt(a.level, 4);
  manifest.config["strict"] = a.strict ? "true" : "false";
  finish_manifest(manifest, fs::path(a.out) / "manifest.json");

  std::cout << render_summary(report);
  return kExitOk;
}

// ---- theory ----------------------------------------------------------------

struct OccamArgs {
  std::vector<std::size_t> family_sizes{16, 1024}, ms{100, 2386};
  std::vector<double> deltas{0.01, 0.1};
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_occam(const OccamArgs& a) {
  if (a.trials == 0) throw ArgumentError("--trials must be >= 1");
  auto manifest = start_manifest("theory occam");
  manifest.seeds["seed"] = a.seed;
  manifest.config["trials"] = std::to_string(a.trials);

  std::string csv = "task,m,family_size,delta,bound,bound_simplified,violations,n_trials,violation_rate,gate,pass\n";
  bool all_pass = true;
  std::uint64_t cell = 0;
  for (auto f : a.family_sizes)
    for (auto m : a.ms)
      for (auto delta : a.deltas) {
        const auto cell_seed = derive_seed(a.seed, cell++);
        const auto tasks = adversarial_suite(f, m, delta, cell_seed);
        const double gate = occam_gate(delta, a.trials);
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          const auto check = verify_occam_bound(tasks[t], m, delta, a.trials, derive_seed(cell_seed, t + 1),
                                                cpu_threads());
          const bool pass = check.violation_rate <= gate;
          all_pass = all_pass && pass;
          csv += tasks[t].name + "," + std::to_string(m) + "," + std::to_string(f) + "," + fmt(delta, 4) + "," +
                 fmt(check.bound_value) + "," + fmt(occam_bound_simplified(f, m)) + "," +
                 std::to_string(check.violations) + "," + std::to_string(check.n_trials) + "," +
                 fmt(check.violation_rate) + "," + fmt(gate) + "," + (pass ? "true" : "false") + "\n";
          std::cout << tasks[t].name << " |F|=" << f << " m=" << m << " delta=" << delta
                    << " bound=" << fmt(check.bound_value, 4) << " violation_rate=" << fmt(check.violation_rate, 4)
                    << " gate=" << fmt(gate, 4) << (pass ? " ok" : " FAIL") << "\n";
        }
      }
  if (!a.out.empty()) {
    text::write_file_atomic(a.out, csv);
    finish_manifest(manifest, sidecar(a.out));
  }
  std::cout << "simplified bound at |F|=1024, m=2386: " << fmt(occam_bound_simplified(1024, 2386), 4) << "\n";
  return all_pass ? kExitOk : kExitPartial;
}

struct WhalebreakArgs {
  double b = 1.0, c = 4.0;
  std::string epsilon = "1/2400";
  std::vector<std::size_t> ns{4, 6, 8, 10};
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_whalebreak(const WhalebreakArgs& a) {
  if (a.trials == 0) throw ArgumentError("--trials must be >= 1");
  const double eps = parse_ratio(a.epsilon);
  auto manifest = start_manifest("theory whalebreak");
  manifest.seeds["seed"] = a.seed;
  manifest.config["trials"] = std::to_string(a.trials);
  manifest.config["b"] = fmt(a.b, 4);
  manifest.config["c"] = fmt(a.c, 4);
  manifest.config["epsilon"] = a.epsilon;

  std::string csv =
      "n,b,epsilon,c,family_size,m,gap_bound,n_trials,exceedances,exceedance_fraction,mean_gap,max_gap,gate,pass\n";
  const double gate = whalebreak_gate(a.trials);
  bool all_pass = true;
  for (std::size_t i = 0; i < a.ns.size(); ++i) {
    WhalebreakScenario s{a.ns[i], a.b, eps, a.c};
    s.validate();
    const auto r = simulate_whalebreak(s, dense_near_optimal_task, a.trials, derive_seed(a.seed, i), cpu_threads());
    const bool pass = r.exceedance_fraction <= gate;
    all_pass = all_pass && pass;
    csv += std::to_string(s.n) + "," + fmt(s.b, 4) + "," + fmt(s.epsilon, 8) + "," + fmt(s.c, 4) + "," +
           std::to_string(r.family_size) + "," + std::to_string(r.m) + "," + fmt(r.gap_bound) + "," +
           std::to_string(r.n_trials) + "," + std::to_string(r.exceedances) + "," + fmt(r.exceedance_fraction) +
           "," + fmt(r.mean_gap) + "," + fmt(r.max_gap) + "," + fmt(gate) + "," + (pass ? "true" : "false") + "\n";
    std::cout << "n=" << s.n << " |F|=" << r.family_size << " m=" << r.m << " gap_bound=" << fmt(r.gap_bound, 4)
              << " exceedance=" << fmt(r.exceedance_fraction, 4) << " mean_gap=" << fmt(r.mean_gap, 4)
              << (pass ? " ok" : " FAIL") << "\n";
  }
  if (!a.out.empty()) {
    text::write_file_atomic(a.out, csv);
    finish_manifest(manifest, sidecar(a.out));
  }
  std::cout << "asymptotic gap sqrt(epsilon c 3b/2) = " << fmt(whalebreak_gap_limit(a.b, eps, a.c), 4) << "\n";
  return all_pass ? kExitOk : kExitPartial;
}

// ---- conlang ---------------------------------------------------------------

struct ConlangArgs {
  std::size_t n = 10;
  std::string out, model;
};

int cmd_conlang(const ConlangArgs& a) {
  if (a.n == 0) throw ArgumentError("--n must be >= 1");
  auto client = make_client(backend_config(a.model));
  const auto ideas = ideate(a.n, *client);
  std::cout << "ideas " << ideas.size() << ", planet initial-letter entropy " << fmt(initial_letter_entropy(ideas), 3)
            << " bits\n";

  std::vector<std::string> dirs;
  std::set<std::string> taken;
  for (const auto& idea : ideas) {
    auto name = bundle_dir_name(idea.language);
    for (int k = 2; taken.count(name); ++k) name = bundle_dir_name(idea.language) + "-" + std::to_string(k);
    taken.insert(name);
    dirs.push_back(name);
  }

  std::vector<std::optional<ScrubResult>> results(ideas.size());
  std::vector<std::string> errors(ideas.size());
  parallel_for(ideas.size(), g_flags.max_inflight, [&](std::size_t i) {
    try {
      results[i] = scrub_leakage(generate_bundle(ideas[i], *client));
    } catch (const GenerationError& e) {
      errors[i] = e.what();
    } catch (const ValidationError& e) {
      errors[i] = e.what();
    }
  });

  bool partial = false;
  for (std::size_t i = 0; i < ideas.size(); ++i) {
    if (!results[i]) {
      partial = true;
      std::cout << "bundle " << dirs[i] << " failed: " << errors[i] << "\n";
      continue;
    }
    const fs::path dir = fs::path(a.out) / dirs[i];
    write_bundle(results[i]->bundle, results[i]->removals, dir);
    auto manifest = start_manifest("conlang");
    note_model(manifest, "model", a.model);
    manifest.config["n"] = std::to_string(a.n);
    manifest.config["bundle_index"] = std::to_string(i);
    finish_manifest(manifest, dir / "manifest.json");
    std::cout << "bundle " << dirs[i] << ": " << results[i]->bundle.texts.size() << " texts, "
              << results[i]->removals.size() << " leakage reports\n";
  }
  return partial ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv, argv + argc);
  CLI::App app{"ShufflEval: reference-free translation evaluation by segment shuffling"};
  app.set_version_flag("--version", std::string(SHUFFLEVAL_VERSION));
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--endpoint", g_flags.endpoint, "Chat-completions URL for remote models")
      ->envname("SHUFFLEVAL_ENDPOINT");
  app.add_option("--api-key", g_flags.api_key, "Bearer token for remote models")->envname("SHUFFLEVAL_API_KEY");
  app.add_option("--cache-dir", g_flags.cache_dir, "Response cache directory")->capture_default_str();
  app.add_option("--decoding-params", g_flags.decoding_params, "JSON object merged into request bodies")
      ->capture_default_str();
  app.add_flag("--offline", g_flags.offline, "Forbid network; a cache miss is an error");
  app.add_option("--max-inflight", g_flags.max_inflight, "Concurrent model calls")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-retries", g_flags.max_retries, "Retries per call")->capture_default_str();
  app.add_option("--timeout", g_flags.timeout_s, "Per-call timeout, seconds")->capture_default_str();
  app.add_option("--threads", g_flags.threads, "Worker threads for simulations and bootstrap (0 = all cores)")
      ->capture_default_str();

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Filter and truncate a corpus");
  prepare->add_option("--corpus", prep.corpus)->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", prep.out)->required();
  prepare->add_option("--min-chars", prep.min_chars);
  prepare->add_option("--created-after", prep.created_after, "YYYY-MM-DD, exclusive");
  prepare->add_flag("--require-reference", prep.require_reference);
  prepare->add_option("--max-segments", prep.max_segments);

  ProbeArgs probe_args;
  auto* probe = app.add_subcommand("probe", "Judge accuracy on source documents against their own shuffles");
  probe->add_option("--corpus", probe_args.corpus)->required()->check(CLI::ExistingFile);
  probe->add_option("--judge-model", probe_args.judge_model)->required();
  probe->add_option("--n-perms", probe_args.n_perms)->capture_default_str();
  probe->add_option("--seed", probe_args.seed)->capture_default_str();
  probe->add_option("--bias-threshold", probe_args.bias_threshold)->capture_default_str();
  probe->add_option("--source-description", probe_args.source_description)->capture_default_str();

  TranslateArgs tr;
  auto* translate = app.add_subcommand("translate", "Translate a corpus segment by segment");
  translate->add_option("--corpus", tr.corpus)->required()->check(CLI::ExistingFile);
  translate->add_option("--model", tr.model)->required();
  translate->add_option("--out", tr.out)->required();
  translate->add_option("--template", tr.template_kind)
      ->check(CLI::IsMember({"low_resource", "conlang"}))
      ->capture_default_str();
  translate->add_option("--conlang-dir", tr.conlang_dir, "Bundle directory supplying the conlang context");
  translate->add_option("--source-language", tr.source_language, "Overrides document language names");
  translate->add_option("--translator-id", tr.translator_id, "Defaults to the model id");
  translate->add_flag("--whole-document", tr.whole_document, "Translate each document in one call");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Score translations with ShufflEval and/or the reference baseline");
  score->add_option("--corpus", sc.corpus)->required()->check(CLI::ExistingFile);
  score->add_option("--mt", sc.mt)->required()->check(CLI::ExistingFile);
  score->add_option("--out", sc.out)->required();
  score->add_option("--judge-model", sc.judge_model);
  score->add_option("--baseline-model", sc.baseline_model, "Defaults to --judge-model");
  score->add_option("--metric", sc.metric)
      ->check(CLI::IsMember({"shuffleval", "baseline", "both"}))
      ->capture_default_str();
  score->add_option("--mode", sc.mode)->check(CLI::IsMember({"exact", "monte_carlo"}))->capture_default_str();
  score->add_option("--n-perms", sc.n_perms)->capture_default_str();
  score->add_option("--seed", sc.seed)->capture_default_str();
  score->add_option("--source-description", sc.source_description)->capture_default_str();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Correlate ShufflEval with baseline scores");
  report->add_option("--scores", rep.scores)->required()->check(CLI::ExistingFile);
  report->add_option("--corpus", rep.corpus, "Supplies document languages")->check(CLI::ExistingFile);
  report->add_option("--out", rep.out)->required();
  report->add_option("--group-by", rep.group_by)->check(CLI::IsMember({"row", "translator", "language"}));
  report->add_option("--bootstrap-resamples", rep.resamples)->capture_default_str();
  report->add_option("--level", rep.level)->capture_default_str();
  report->add_option("--seed", rep.seed)->capture_default_str();
  report->add_flag("--strict", rep.strict, "Drop rows carrying failure flags");

  auto* theory = app.add_subcommand("theory", "Simulations of the generalization bounds");
  theory->require_subcommand(1);
  OccamArgs oc;
  auto* occam = theory->add_subcommand("occam", "ERM violation rates over the adversarial task suite");
  occam->add_option("--family-sizes", oc.family_sizes)->capture_default_str();
  occam->add_option("--ms", oc.ms)->capture_default_str();
  occam->add_option("--deltas", oc.deltas)->capture_default_str();
  occam->add_option("--trials", oc.trials)->capture_default_str();
  occam->add_option("--seed", oc.seed)->capture_default_str();
  occam->add_option("--out", oc.out, "CSV path");
  WhalebreakArgs wb;
  auto* whale = theory->add_subcommand("whalebreak", "Observation-only learner vs. the interactive budget");
  whale->add_option("--b", wb.b)->capture_default_str();
  whale->add_option("--epsilon", wb.epsilon, "Ratio, e.g. 1/2400")->capture_default_str();
  whale->add_option("--c", wb.c)->capture_default_str();
  whale->add_option("--ns", wb.ns)->capture_default_str();
  whale->add_option("--trials", wb.trials)->capture_default_str();
  whale->add_option("--seed", wb.seed)->capture_default_str();
  whale->add_option("--out", wb.out, "CSV path");

  ConlangArgs cl;
  auto* conlang = app.add_subcommand("conlang", "Generate conlang bundles");
  conlang->add_option("--n", cl.n)->capture_default_str();
  conlang->add_option("--out", cl.out)->required();
  conlang->add_option("--model", cl.model)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*probe) return cmd_probe(probe_args);
    if (*translate) return cmd_translate(tr);
    if (*score) {
      if (sc.metric != "baseline" && sc.judge_model.empty()) throw ConfigError("--judge-model is required");
      if (sc.metric != "shuffleval" && sc.judge_model.empty() && sc.baseline_model.empty())
        throw ConfigError("--baseline-model or --judge-model is required");
      return cmd_score(sc);
    }
    if (*report) return cmd_report(rep);
    if (*occam) return cmd_occam(oc);
    if (*whale) return cmd_whalebreak(wb);
    if (*conlang) return cmd_conlang(cl);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}
