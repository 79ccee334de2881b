#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shuffleval/analysis.hpp"
#include "shuffleval/backend.hpp"
#include "shuffleval/conlang.hpp"
#include "shuffleval/corpus.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/judge.hpp"
#include "shuffleval/permute.hpp"
#include "shuffleval/scorer.hpp"
#include "shuffleval/theorysim.hpp"
#include "shuffleval/translator.hpp"

namespace py = pybind11;
using namespace shuffleval;

namespace {

BackendConfig oracle_config(const std::string& model_id) {
  BackendConfig cfg;
  cfg.model_id = model_id;
  cfg.kind = infer_backend_kind(model_id);
  return cfg;
}

SegmentedTranslation make_translation(std::string doc_id, std::string translator_id,
                                      std::vector<std::string> segments) {
  SegmentedTranslation t;
  t.doc_id = std::move(doc_id);
  t.translator_id = std::move(translator_id);
  t.segments = std::move(segments);
  return t;
}

}  // namespace

PYBIND11_MODULE(_shuffleval, m) {
  m.doc() = "ShufflEval core bindings";
  m.attr("__version__") = SHUFFLEVAL_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UndefinedCorrelation>(m, "UndefinedCorrelation", base.ptr());

  m.def("enumerate_nonidentity", [](std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& p : enumerate_nonidentity(k)) out.push_back(p.mapping());
    return out;
  });
  m.def(
      "sample_nonidentity",
      [](std::size_t k, std::size_t n, std::uint64_t seed) {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& p : sample_nonidentity(k, n, seed)) out.push_back(p.mapping());
        return out;
      },
      py::arg("k"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "render_shuffle_prompt",
      [](std::vector<std::string> first, std::vector<std::string> second, std::string source_description) {
        return render_shuffle_prompt(OrderingPair{std::move(first), std::move(second), std::move(source_description)},
                                     true);
      },
      py::arg("first"), py::arg("second"), py::arg("source_description") = std::string(kDefaultSourceDescription));
  m.def("parse_choice", &parse_choice);

  m.def(
      "shuffleval_score",
      [](std::vector<std::string> segments, const std::string& judge_model, const std::string& mode,
         std::size_t n_samples, std::uint64_t seed) {
        Client client(oracle_config(judge_model), make_backend(oracle_config(judge_model)));
        ShufflEvalOptions opts;
        opts.mode = parse_score_mode(mode);
        opts.n_samples = n_samples;
        opts.seed = seed;
        return shuffleval_score(make_translation("doc", "mt", std::move(segments)), client, opts).score;
      },
      py::arg("segments"), py::arg("judge_model") = "oracle:ascending-tag", py::arg("mode") = "exact",
      py::arg("n_samples") = kDefaultPermutationSamples, py::arg("seed") = 0);

  m.def(
      "render_baseline_prompt",
      [](std::vector<std::string> reference, std::vector<std::string> candidate) {
        return render_baseline_prompt(make_translation("doc", "ref", std::move(reference)),
                                      make_translation("doc", "mt", std::move(candidate)));
      },
      py::arg("reference"), py::arg("candidate"));
  m.def("extract_translation", &extract_translation);

  m.def(
      "pearson",
      [](const std::vector<double>& xs, const std::vector<double>& ys) { return pearson(xs, ys); });
  m.def(
      "bootstrap_ci",
      [](const std::vector<double>& xs, const std::vector<double>& ys, std::size_t n_resamples, double level,
         std::uint64_t seed) {
        const auto ci = bootstrap_ci(xs, ys, n_resamples, level, seed);
        return py::make_tuple(ci.estimate, ci.low, ci.high);
      },
      py::arg("xs"), py::arg("ys"), py::arg("n_resamples") = kDefaultBootstrapResamples, py::arg("level") = 0.95,
      py::arg("seed") = 0);

  m.def("occam_bound", &occam_bound, py::arg("family_size"), py::arg("m"), py::arg("delta"));
  m.def("occam_bound_simplified", &occam_bound_simplified, py::arg("family_size"), py::arg("m"));
  m.def("whalebreak_gap_limit", &whalebreak_gap_limit, py::arg("b"), py::arg("epsilon"), py::arg("c"));

  m.def("render_ideation_prompt", &render_ideation_prompt, py::arg("n"));
  m.def("repair_structured_output", &repair_structured_output);
}
