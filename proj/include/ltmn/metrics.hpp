#pragma once

// Answer quality: exact match (EMA), partial match (PMA) and smoothed
// sentence-level BLEU. All comparisons are case-insensitive.
//
// PMA counts a prediction as a partial match when it shares at least one
// token with the gold answer. BLEU uses n-grams up to
// N = min(4, |pred|, |gold|); unigram precision is unsmoothed, higher orders
// use add-one smoothing, and the brevity penalty exp(1 - |gold|/|pred|)
// applies when the prediction is shorter. Set-level scores are plain means.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltmn/corpus.hpp"
#include "ltmn/model.hpp"

namespace ltmn::metrics {

int exact_match(const corpus::Tokens& pred, const corpus::Tokens& gold);
int partial_match(const corpus::Tokens& pred, const corpus::Tokens& gold);
double bleu(const corpus::Tokens& pred, const corpus::Tokens& gold);

struct ExampleResult {
  std::string question;
  corpus::Tokens gold;
  corpus::Tokens pred;
  int em = 0;
  int pm = 0;
  double bleu = 0.0;
};

struct MetricsReport {
  double ema = 0.0;
  double pma = 0.0;
  double bleu = 0.0;
  std::size_t n_examples = 0;
  std::vector<ExampleResult> details;
};

ExampleResult score(std::string question, corpus::Tokens pred, corpus::Tokens gold);
// Means over the detail list, summed in list order.
MetricsReport aggregate(std::vector<ExampleResult> details);

// Greedy-decodes every instance and scores it against its gold answer.
MetricsReport evaluate(ModelParameters& params, const corpus::Vocabulary& vocab,
                       const std::vector<corpus::QAInstance>& dataset, const ModelConfig& config);

// Tab-separated rows `question gold prediction em pm bleu`, then one summary
// line starting with `#summary`.
void write_report(std::ostream& out, const MetricsReport& report);

std::string join(const corpus::Tokens& tokens, const char* sep = " ");

}  // namespace ltmn::metrics
