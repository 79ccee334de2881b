#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "brute_force.hpp"
#include "json.hpp"
#include "planted.hpp"
#include "shuffleval/analysis.hpp"
#include "shuffleval/conlang.hpp"
#include "shuffleval/scorer.hpp"
#include "shuffleval/theorysim.hpp"
#include "shuffleval/translator.hpp"
#include "support.hpp"

using namespace shuffleval;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    o.pass = false;
    o.detail += "; over time budget";
  }
  if (!o.pass) ++g_failures;
  std::ostringstream t;
  t << std::fixed << std::setprecision(2) << secs;
  std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << " [" << t.str()
            << "s]" << std::endl;
}

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

SegmentedTranslation as_translation(const SegmentedDocument& d, const std::string& translator = "mt") {
  return testsupport::translation(d.segments, d.doc_id, translator);
}

// 1 -------------------------------------------------------------------------
Outcome exact_matches_brute_force() {
  const auto corpus = load_corpus(testsupport::fixture("tags.jsonl"));
  auto client = testsupport::oracle_client("oracle:ascending-tag");
  std::set<std::size_t> ks;
  std::size_t docs = 0;
  for (const auto& d : corpus.documents) {
    if (d.k() < 2) continue;
    ShufflEvalOptions opts;
    opts.mode = ScoreMode::exact;
    const auto r = shuffleval_score(as_translation(d), client, opts);
    const auto prefs = bruteforce::preferences(d.segments);
    if (r.verdicts.size() != prefs.size()) return {false, d.doc_id + " permutation count differs"};
    for (std::size_t i = 0; i < prefs.size(); ++i)
      if (r.verdicts[i].verdict.preference != prefs[i]) return {false, d.doc_id + " verdict " + std::to_string(i)};
    const double want = bruteforce::score(d.segments);
    if (std::abs(r.score - want) > 4 * std::numeric_limits<double>::epsilon())
      return {false, d.doc_id + " score " + num(r.score, 17) + " vs " + num(want, 17)};
    ks.insert(d.k());
    ++docs;
  }
  if (ks != std::set<std::size_t>{2, 3, 4, 5}) return {false, "fixture does not cover k=2..5"};
  return {true, std::to_string(docs) + " docs, k in {2,3,4,5}, exact equality"};
}

// 2 -------------------------------------------------------------------------
Outcome monte_carlo_consistency() {
  const auto corpus = load_corpus(testsupport::fixture("tags.jsonl"));
  const auto* doc = corpus.find("tag-k4");
  if (!doc || doc->k() != 4) return {false, "tag-k4 missing"};
  auto client = testsupport::oracle_client("oracle:ascending-tag");
  ShufflEvalOptions exact;
  exact.mode = ScoreMode::exact;
  const auto ex = shuffleval_score(as_translation(*doc), client, exact);

  double var = 0;
  for (const auto& v : ex.verdicts) var += (v.verdict.preference - ex.score) * (v.verdict.preference - ex.score);
  var /= static_cast<double>(ex.verdicts.size());

  const std::size_t seeds = 1000;
  double sum = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    ShufflEvalOptions mc;
    mc.seed = s;
    sum += shuffleval_score(as_translation(*doc), client, mc).score;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt(var / static_cast<double>(seeds * kDefaultPermutationSamples));
  const double z = std::abs(mean - ex.score) / se;
  return {z <= 3.0, "exact " + num(ex.score) + ", mc mean " + num(mean) + ", se " + num(se) + ", |z| " + num(z, 3)};
}

// 3 -------------------------------------------------------------------------
Outcome hallucination_separation() {
  const std::size_t n_docs = 200;
  auto judge = testsupport::oracle_client("oracle:ascending-tag");
  auto echo = testsupport::oracle_client("oracle:echo");
  auto halluc = testsupport::oracle_client("oracle:hallucinate");
  double faithful = 0, hallucinated = 0;
  ShufflEvalOptions opts;
  opts.mode = ScoreMode::exact;
  for (std::size_t i = 0; i < n_docs; ++i) {
    SegmentedDocument d;
    d.doc_id = "synthetic-" + std::to_string(i);
    d.language = "ha";
    const std::size_t k = 3 + i % 3;
    for (std::size_t s = 1; s <= k; ++s)
      d.segments.push_back(std::to_string(s) + ". Passage " + std::to_string(i) + " part " + std::to_string(s) + ".");
    TranslationJob job{d, "oracle:echo", TemplateKind::low_resource, std::nullopt, "Hausa"};
    faithful += shuffleval_score(translate_document(job, echo), judge, opts).score;
    job.translator_model = "oracle:hallucinate";
    hallucinated += shuffleval_score(translate_document(job, halluc), judge, opts).score;
  }
  faithful /= n_docs;
  hallucinated /= n_docs;
  const bool ok = faithful >= 0.95 && std::abs(hallucinated - 0.5) <= 0.05;
  return {ok, "faithful mean " + num(faithful, 4) + ", hallucinated mean " + num(hallucinated, 4)};
}

// 4 -------------------------------------------------------------------------
Outcome order_bias_cancels() {
  const auto corpus = load_corpus(testsupport::fixture("tags.jsonl"));
  std::size_t checked = 0;
  for (const std::string model : {"oracle:always-1", "oracle:always-2"}) {
    auto client = testsupport::oracle_client(model);
    for (const auto& d : corpus.documents) {
      if (d.k() < 2) continue;
      for (auto mode : {ScoreMode::exact, ScoreMode::monte_carlo}) {
        ShufflEvalOptions opts;
        opts.mode = mode;
        opts.seed = 3;
        const auto r = shuffleval_score(as_translation(d), client, opts);
        if (r.score != 0.5) return {false, model + " on " + d.doc_id + " gave " + num(r.score, 17)};
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " scores, all exactly 0.5"};
}

// 5 -------------------------------------------------------------------------
Outcome occam_gate_holds() {
  const std::size_t trials = 2000;
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::size_t cells = 0;
  std::string worst;
  double worst_margin = -1;
  bool ok = true;
  std::uint64_t seed = 0;
  for (std::size_t f : {16, 1024})
    for (std::size_t m : {100, 2386})
      for (double delta : {0.01, 0.1}) {
        const auto tasks = adversarial_suite(f, m, delta, derive_seed(2024, seed++));
        const double gate = occam_gate(delta, trials);
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          const auto c = verify_occam_bound(tasks[t], m, delta, trials, derive_seed(7, seed * 10 + t), threads);
          ++cells;
          if (c.violation_rate > gate) {
            ok = false;
            worst = tasks[t].name + " |F|=" + std::to_string(f) + " m=" + std::to_string(m);
          }
          worst_margin = std::max(worst_margin, c.violation_rate - gate);
        }
      }
  const double simplified = occam_bound_simplified(1024, 2386);
  const double exact = occam_bound(1024, 2386, 0.01);
  ok = ok && std::abs(simplified - 0.100) <= 0.001;
  std::string d = std::to_string(cells) + " task cells, max(rate - gate) " + num(worst_margin, 4) +
                  ", bound(|F|=1024, m=2386) simplified " + num(simplified, 3) + " exact(delta=0.01) " +
                  num(exact, 4);
  if (!worst.empty()) d += ", violated on " + worst;
  return {ok, d};
}

// 6 -------------------------------------------------------------------------
Outcome whalebreak_arithmetic() {
  const double limit = whalebreak_gap_limit(1.0, 1.0 / 2400.0, 4.0);
  bool ok = std::abs(limit - 0.0500) <= 1e-4 && std::abs(limit - std::sqrt(6.0 / 2400.0)) <= 1e-15;
  const std::size_t trials = 1000;
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  const double gate = whalebreak_gate(trials);
  double worst = 0;
  for (std::size_t n : {4, 6, 8, 10}) {
    WhalebreakScenario s{n, 1.0, 1.0 / 2400.0, 4.0};
    const auto r = simulate_whalebreak(s, dense_near_optimal_task, trials, derive_seed(99, n), threads);
    worst = std::max(worst, r.exceedance_fraction);
    if (r.exceedance_fraction > gate) ok = false;
  }
  return {ok, "gap limit " + num(limit, 6) + ", worst exceedance " + num(worst, 4) + " (gate " + num(gate, 4) + ")"};
}

// 7 -------------------------------------------------------------------------
Outcome pearson_and_bootstrap() {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  const double r = pearson(x, y);
  auto [xs, ys] = planted_pairs(1500, 0.5, 17);
  const auto ci = bootstrap_ci(xs, ys, 10000, 0.95, 5, std::max(1u, std::thread::hardware_concurrency()));
  const double hw = ci.half_width();
  const bool ok = std::abs(r - 0.6) <= 1e-12 && hw >= 0.03 && hw <= 0.05;
  return {ok, "r " + num(r, 15) + ", planted r=0.5 n=1500 CI half-width " + num(hw, 4)};
}

// 8 -------------------------------------------------------------------------
class FixtureServer {
 public:
  FixtureServer() {
    for (const auto& [name, oracle] : std::map<std::string, std::string>{{"echo-mt", "oracle:echo"},
                                                                         {"noise-mt", "oracle:hallucinate"},
                                                                         {"tag-judge", "oracle:ascending-tag"},
                                                                         {"overlap-judge", "oracle:overlap"}})
      backends_[name] = make_oracle_backend(oracle);
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      const auto body = nlohmann::json::parse(req.body);
      const auto it = backends_.find(body.at("model").get<std::string>());
      if (it == backends_.end()) {
        res.status = 404;
        return;
      }
      const std::string content = it->second->complete(body.at("messages").at(0).at("content").get<std::string>());
      nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FixtureServer() { stop(); }
  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  std::size_t hits() const { return hits_.load(); }

 private:
  std::map<std::string, std::shared_ptr<Backend>> backends_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> hits_{0};
};

int sh(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// Runs translate -> score -> report into out; returns the first failing step or "".
std::string pipeline(const fs::path& work, const std::string& out, const std::string& globals) {
  const std::string cli = "env -u SHUFFLEVAL_API_KEY -u SHUFFLEVAL_ENDPOINT '" + std::string(SHUFFLEVAL_CLI_PATH) +
                          "' " + globals + " ";
  const std::string corpus = "'" + testsupport::fixture("tags.jsonl").string() + "'";
  const std::string pre = "cd '" + work.string() + "' && mkdir -p " + out + " && ";
  const std::string log = " >> " + out + ".log 2>&1";
  for (const std::string mt : {"echo-mt", "noise-mt"}) {
    if (sh(pre + cli + "translate --corpus " + corpus + " --model " + mt + " --out " + out + "/" + mt + ".jsonl" +
           log) != 0)
      return "translate " + mt;
    const int rc = sh(pre + cli + "score --corpus " + corpus + " --mt " + out + "/" + mt +
                      ".jsonl --metric both --judge-model tag-judge --baseline-model overlap-judge --mode monte_carlo"
                      " --n-perms 10 --seed 4 --out " +
                      out + "/scores-" + mt + ".jsonl" + log);
    if (rc != 0) return "score " + mt;
  }
  if (sh(pre + cli + "report --scores " + out + "/scores-echo-mt.jsonl " + out + "/scores-noise-mt.jsonl --corpus " +
         corpus + " --bootstrap-resamples 2000 --seed 8 --out " + out + "/report" + log) != 0)
    return "report";
  return "";
}

// Data files under dir keyed by relative path; run manifests excluded.
std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "manifest.json" || name.ends_with(".manifest.json")) continue;
    out[fs::relative(e.path(), dir).string()] = text::read_file(e.path());
  }
  return out;
}

Outcome offline_determinism() {
  testsupport::TempDir work("acceptance-determinism");
  FixtureServer server;
  const std::string ep = " --endpoint " + server.endpoint() + " --cache-dir cache --max-retries 1";
  if (auto step = pipeline(work.path(), "warm", ep + " --api-key fixture-key --max-inflight 4"); !step.empty())
    return {false, "warm run failed at " + step};
  const auto warm_hits = server.hits();
  server.stop();
  if (warm_hits == 0) return {false, "warm run never reached the server"};

  const std::vector<std::pair<std::string, std::string>> runs{
      {"offline-a", " --offline --threads 1 --max-inflight 1"},
      {"offline-b", " --offline --threads 1 --max-inflight 1"},
      {"offline-c", " --offline --threads 4 --max-inflight 16"}};
  std::map<std::string, std::map<std::string, std::string>> outputs;
  outputs["warm"] = data_files(work.path() / "warm");
  for (const auto& [name, flags] : runs) {
    if (auto step = pipeline(work.path(), name, ep + flags); !step.empty())
      return {false, name + " failed at " + step};
    outputs[name] = data_files(work.path() / name);
  }
  const auto& ref = outputs["offline-a"];
  if (ref.size() < 7) return {false, "only " + std::to_string(ref.size()) + " data files produced"};
  for (const auto& [name, files] : outputs) {
    if (files.size() != ref.size()) return {false, name + " produced a different file set"};
    for (const auto& [rel, bytes] : ref) {
      const auto it = files.find(rel);
      if (it == files.end() || it->second != bytes) return {false, name + " differs from offline-a in " + rel};
    }
  }
  return {true, std::to_string(ref.size()) + " data files byte-identical across warm, 2 offline runs and " +
                    "thread/in-flight settings (" + std::to_string(warm_hits) + " warm calls)"};
}

// 9 -------------------------------------------------------------------------
Outcome prompt_goldens() {
  using testsupport::golden;
  const ConlangIdea idea{"Oss", "Thrummers", "Vel'ar", "Ogham", "They speak in tides"};
  auto one = [](std::string seg, std::string lang) {
    SegmentedDocument d;
    d.doc_id = "g";
    d.language = std::move(lang);
    d.segments = {std::move(seg)};
    return d;
  };
  const TranslationJob low{one("Sannu da zuwa.", "ha"), "m", TemplateKind::low_resource, std::nullopt, "Hausa"};
  const TranslationJob con{one("ka vel tor.", "Vel'ar"), "m", TemplateKind::conlang,
                           ConlangContext{"Vel'ar", "Thrummers", "Oss", "CONCULTURE BODY", "CONLANG BODY"}, ""};
  const std::vector<std::pair<std::string, std::string>> checks{
      {"shuffle.txt",
       render_shuffle_prompt({{"1. Alpha.", "2. Beta."}, {"2. Beta.", "1. Alpha."}, "a Wikipedia article"}, true)},
      {"baseline.txt", render_baseline_prompt(testsupport::translation({"Ref one.", "Ref two."}),
                                              testsupport::translation({"MT one.", "MT two."}))},
      {"translate_low_resource.txt", render_translation_prompt("Sannu da zuwa.", low)},
      {"translate_conlang.txt", render_translation_prompt("ka vel tor.", con)},
      {"ideation.txt", render_ideation_prompt(10)},
      {"conculture.txt", render_conculture_prompt(idea)},
      {"conlang_definition.txt", render_conlang_prompt(idea, "CONCULTURE BODY")},
      {"parallel_texts.txt", render_parallel_text_prompt(idea, "CONCULTURE BODY", "CONLANG BODY")}};
  for (const auto& [file, rendered] : checks)
    if (rendered != golden(file)) return {false, file + " differs"};
  return {true, std::to_string(checks.size()) + " templates byte-identical"};
}

// 10 ------------------------------------------------------------------------
Outcome conlang_pipeline() {
  auto client = testsupport::oracle_client("oracle:conlang-fixture");
  const auto ideas = ideate(2, client);
  if (ideas.size() != 2) return {false, "ideation returned " + std::to_string(ideas.size())};
  testsupport::TempDir dir("acceptance-conlang");
  std::size_t removals = 0;
  for (const auto& idea : ideas) {
    const auto bundle = generate_bundle(idea, client);
    bundle.validate();
    const auto scrubbed = scrub_leakage(bundle);
    scrubbed.bundle.validate();
    // The fixture plants a parenthetical gloss at text 3 sentence 1 and an inline sentence at text 7 sentence 0.
    for (auto [t, s] : {std::pair<std::size_t, std::size_t>{3, 1}, {7, 0}}) {
      const bool found = std::any_of(scrubbed.removals.begin(), scrubbed.removals.end(), [&](const auto& r) {
        return r.text_index == t && r.sentence_index == s && r.rule != "whole_sentence";
      });
      if (!found)
        return {false, idea.language + ": planted leak at text " + std::to_string(t) + " sentence " +
                           std::to_string(s) + " not removed"};
    }
    for (const auto& t : scrubbed.bundle.texts)
      for (std::size_t s = 0; s < t.source.size(); ++s) {
        std::string eng = text::to_lower_ascii(t.english[s]);
        if (!eng.empty() && (eng.back() == '.' || eng.back() == '!' || eng.back() == '?')) eng.pop_back();
        if (text::to_lower_ascii(t.source[s]).find(eng) != std::string::npos)
          return {false, idea.language + ": leak survived in \"" + t.source[s] + "\""};
        if (t.source[s].find('(') != std::string::npos)
          return {false, idea.language + ": gloss survived in \"" + t.source[s] + "\""};
      }
    const auto out = dir.path() / bundle_dir_name(idea.language);
    write_bundle(scrubbed.bundle, scrubbed.removals, out);
    if (!(load_bundle(out) == scrubbed.bundle)) return {false, "bundle round trip changed " + idea.language};
    if (text::read_file(out / "leakage.json").size() <= 2) return {false, "empty leakage report"};
    removals += scrubbed.removals.size();
  }
  return {true, "2 bundles valid and aligned, " + std::to_string(removals) + " leaks scrubbed and reported"};
}

}  // namespace

int main() {
  criterion(1, "exact ShufflEval equals brute force", 5, exact_matches_brute_force);
  criterion(2, "Monte Carlo mean within 3 SE of exact", 30, monte_carlo_consistency);
  criterion(3, "hallucination separation", 60, hallucination_separation);
  criterion(4, "order-bias cancellation", 0, order_bias_cancels);
  criterion(5, "ERM bound violation gate", 120, occam_gate_holds);
  criterion(6, "whalebreak gap arithmetic and gate", 0, whalebreak_arithmetic);
  criterion(7, "Pearson and bootstrap CI", 0, pearson_and_bootstrap);
  criterion(8, "offline pipeline determinism", 0, offline_determinism);
  criterion(9, "prompt templates match goldens", 0, prompt_goldens);
  criterion(10, "conlang fixture pipeline", 0, conlang_pipeline);
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
