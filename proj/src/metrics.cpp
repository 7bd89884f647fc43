#include "ltmn/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>

namespace ltmn::metrics {

namespace {

corpus::Tokens fold(const corpus::Tokens& t) {
  corpus::Tokens out = t;
  for (auto& s : out) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::map<corpus::Tokens, int> ngram_counts(const corpus::Tokens& t, std::size_t n) {
  std::map<corpus::Tokens, int> counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    ++counts[corpus::Tokens(t.begin() + static_cast<std::ptrdiff_t>(i),
                            t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

std::string join(const corpus::Tokens& tokens, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

int exact_match(const corpus::Tokens& pred, const corpus::Tokens& gold) {
  return fold(pred) == fold(gold) ? 1 : 0;
}

int partial_match(const corpus::Tokens& pred, const corpus::Tokens& gold) {
  const auto g = fold(gold);
  for (const auto& t : fold(pred)) {
    if (std::find(g.begin(), g.end(), t) != g.end()) return 1;
  }
  return 0;
}

double bleu(const corpus::Tokens& pred_raw, const corpus::Tokens& gold_raw) {
  const auto pred = fold(pred_raw);
  const auto gold = fold(gold_raw);
  if (pred.empty() || gold.empty()) return 0.0;
  const std::size_t order = std::min<std::size_t>({4, pred.size(), gold.size()});
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    const auto pc = ngram_counts(pred, n);
    const auto gc = ngram_counts(gold, n);
    int matched = 0;
    for (const auto& [gram, c] : pc) {
      if (auto it = gc.find(gram); it != gc.end()) matched += std::min(c, it->second);
    }
    const double total = static_cast<double>(pred.size() - n + 1);
    double precision;
    if (n == 1) {
      if (matched == 0) return 0.0;
      precision = matched / total;
    } else {
      precision = (matched + 1.0) / (total + 1.0);
    }
    log_sum += std::log(precision);
  }
  double bp = 1.0;
  if (pred.size() < gold.size()) {
    bp = std::exp(1.0 - static_cast<double>(gold.size()) / static_cast<double>(pred.size()));
  }
  return bp * std::exp(log_sum / static_cast<double>(order));
}

ExampleResult score(std::string question, corpus::Tokens pred, corpus::Tokens gold) {
  ExampleResult r;
  r.em = exact_match(pred, gold);
  r.pm = partial_match(pred, gold);
  r.bleu = bleu(pred, gold);
  r.question = std::move(question);
  r.pred = std::move(pred);
  r.gold = std::move(gold);
  return r;
}

MetricsReport aggregate(std::vector<ExampleResult> details) {
  MetricsReport r;
  r.n_examples = details.size();
  if (!details.empty()) {
    double em = 0, pm = 0, bl = 0;
    for (const auto& d : details) {
      em += d.em;
      pm += d.pm;
      bl += d.bleu;
    }
    const double n = static_cast<double>(details.size());
    r.ema = em / n;
    r.pma = pm / n;
    r.bleu = bl / n;
  }
  r.details = std::move(details);
  return r;
}

MetricsReport evaluate(ModelParameters& params, const corpus::Vocabulary& vocab,
                       const std::vector<corpus::QAInstance>& dataset, const ModelConfig& config) {
  std::vector<ExampleResult> details;
  details.reserve(dataset.size());
  for (const auto& qa : dataset) {
    const Prediction p = predict(params, encode_instance(qa, vocab), config);
    details.push_back(score(join(qa.question), vocab.decode(p.words), qa.answer));
  }
  return aggregate(std::move(details));
}

void write_report(std::ostream& out, const MetricsReport& report) {
  out << "question\tgold\tprediction\tem\tpm\tbleu\n";
  for (const auto& d : report.details) {
    out << d.question << '\t' << join(d.gold) << '\t' << join(d.pred) << '\t' << d.em << '\t'
        << d.pm << '\t' << d.bleu << '\n';
  }
  out << "#summary\tn=" << report.n_examples << "\tema=" << report.ema << "\tpma=" << report.pma
      << "\tbleu=" << report.bleu << '\n';
}

}  // namespace ltmn::metrics
