#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "ltmn/babi_tasks.hpp"
#include "ltmn/checkpoint.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/errors.hpp"
#include "ltmn/metrics.hpp"
#include "ltmn/model_check.hpp"

namespace py = pybind11;
using namespace ltmn;

namespace {

struct LoadedModel {
  training::Checkpoint ck;

  py::tuple answer(const std::vector<std::string>& story, const std::string& question) {
    if (story.empty()) throw ContractError("the story has no sentences");
    corpus::QAInstance qa;
    for (const auto& s : story) qa.context.push_back(corpus::tokenize(s));
    qa.question = corpus::tokenize(question);
    const auto pred = predict(ck.params, encode_instance(qa, ck.vocab), ck.config.model());
    return py::make_tuple(metrics::join(ck.vocab.decode(pred.words)), pred.attention);
  }
};

py::dict gradcheck(double epsilon, double tolerance, std::size_t hops, std::uint64_t seed,
                   bool tie_a_b, double inject_error) {
  ModelCheckOptions o;
  o.epsilon = epsilon;
  o.tolerance = tolerance;
  o.config.hops = hops;
  o.config.seed = seed;
  o.config.tie_a_b = tie_a_b;
  o.inject_error = inject_error;
  const auto r = check_model_gradients(o);
  py::dict per_param;
  for (const auto& p : r.report.params) per_param[py::str(p.name)] = p.max_rel_error;
  py::dict d;
  d["passed"] = r.report.passed;
  d["max_rel_error"] = r.report.max_rel_error;
  d["degraded_epsilon"] = r.report.degraded_epsilon;
  d["vocab_size"] = r.vocab_size;
  d["params"] = per_param;
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_ltmn, m) {
  m.doc() = "Memory-network question answering with multi-word answers";

  // Translators run newest first, so the base class registers first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("tokenize", [](const std::string& s) { return corpus::tokenize(s); });
  m.def("tokenize_answer", [](const std::string& s) { return corpus::tokenize_answer(s); });

  m.def("exact_match", &metrics::exact_match, py::arg("pred"), py::arg("gold"));
  m.def("partial_match", &metrics::partial_match, py::arg("pred"), py::arg("gold"));
  m.def("bleu", &metrics::bleu, py::arg("pred"), py::arg("gold"));

  m.def("generate_task", &babi::generate_task, py::arg("task"), py::arg("n_questions"),
        py::arg("seed") = 1);
  m.def("task_name", &babi::task_name);
  m.def(
      "to_multiword",
      [](const std::string& text) {
        return corpus::apply_replacements(text, corpus::ReplacementTable::multiword_default());
      },
      py::arg("text"));
  m.def("replacement_table",
        [] { return corpus::ReplacementTable::multiword_default().entries; });
  m.def(
      "count_questions",
      [](const std::string& text) { return corpus::count_questions(corpus::parse_babi_string(text)); },
      py::arg("text"));

  m.def("gradcheck", &gradcheck, py::arg("epsilon") = 1e-4, py::arg("tolerance") = 1e-4,
        py::arg("hops") = 1, py::arg("seed") = 1, py::arg("tie_a_b") = false,
        py::arg("inject_error") = 0.0);

  py::class_<LoadedModel>(m, "Model")
      .def_static(
          "load", [](const std::string& path) { return LoadedModel{training::load_checkpoint(path)}; },
          py::arg("path"))
      .def_property_readonly("vocab_size", [](const LoadedModel& lm) { return lm.ck.vocab.size(); })
      .def_property_readonly("epoch", [](const LoadedModel& lm) { return lm.ck.epoch; })
      .def("answer", &LoadedModel::answer, py::arg("story"), py::arg("question"),
           "Greedy answer and the per-hop attention over the story sentences.");

  m.def("cli", &run_cli, py::arg("args"),
        "Run a command-line subcommand; returns (exit_code, stdout, stderr).");
}
