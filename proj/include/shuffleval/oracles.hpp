#pragma once

// Deterministic text-in/text-out stand-ins for remote models. They read the
// same prompts a remote model would, so everything downstream (rendering,
// parsing, caching, bias correction) runs unchanged in offline tests.
//
// Identifiers accepted by make_oracle_backend:
//   oracle:ascending-tag    shuffle judge preferring more ascending integer tags
//   oracle:always-1         judge that always answers "1" (pure slot bias)
//   oracle:always-2         judge that always answers "2"
//   oracle:echo             translator returning the source text verbatim
//   oracle:hallucinate      translator ignoring the source, random tagged prose
//   oracle:overlap          baseline scorer, 100 * token Jaccard(reference, candidate)
//   oracle:conlang-fixture  canned conlang pipeline with planted leakage

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shuffleval/backend.hpp"
#include "shuffleval/judge.hpp"

namespace shuffleval {

std::shared_ptr<Backend> make_oracle_backend(std::string_view model_id);
std::vector<std::string> oracle_model_ids();

// Reads <ORDERING1>/<ORDERING2> back into segment lists and answers with
// oracle_judge under the given coherence function.
class CoherenceJudgeBackend final : public Backend {
 public:
  explicit CoherenceJudgeBackend(CoherenceFn coherence) : coherence_(std::move(coherence)) {}
  std::string complete(const std::string& prompt) override;

 private:
  CoherenceFn coherence_;
};

// Segment lists encoded in a shuffle prompt's ordering block.
std::vector<std::string> ordering_segments(std::string_view prompt, int slot);

class EchoTranslatorBackend final : public Backend {
 public:
  std::string complete(const std::string& prompt) override;
};

class HallucinatingTranslatorBackend final : public Backend {
 public:
  std::string complete(const std::string& prompt) override;
};

class OverlapBaselineBackend final : public Backend {
 public:
  std::string complete(const std::string& prompt) override;
};

class ConlangFixtureBackend final : public Backend {
 public:
  std::string complete(const std::string& prompt) override;
};

// Source text a translation prompt asks to translate (either template).
std::string translation_prompt_source(std::string_view prompt);

}  // namespace shuffleval
