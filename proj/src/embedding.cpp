#include "ltmn/embedding.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ltmn/errors.hpp"

namespace ltmn::embedding {

void EmbeddingConfig::validate() const {
  if (dim < 1) throw ContractError("embedding dimension must be at least 1");
}

double BagOfWords::count(std::size_t index) const {
  auto it = std::lower_bound(counts.begin(), counts.end(), index,
                             [](const auto& e, std::size_t i) { return e.first < i; });
  return it != counts.end() && it->first == index ? it->second : 0.0;
}

ad::Matrix BagOfWords::dense() const {
  ad::Matrix x = ad::Matrix::Zero(static_cast<Eigen::Index>(vocab_size), 1);
  for (const auto& [i, c] : counts) x(static_cast<Eigen::Index>(i), 0) = c;
  return x;
}

BagOfWords encode_bow(const corpus::Tokens& sentence, const corpus::Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& t : sentence) counts[vocab.index(t)] += 1.0;
  counts[corpus::Vocabulary::kEos] += 1.0;
  BagOfWords bow;
  bow.vocab_size = vocab.size();
  bow.counts.assign(counts.begin(), counts.end());
  return bow;
}

namespace {

void check_width(ad::Node m, const BagOfWords& bow) {
  if (static_cast<std::size_t>(m.cols()) != bow.vocab_size) {
    throw DimensionError("embedding matrix " + ad::shape_str(m.value()) +
                         " does not match vocabulary of " + std::to_string(bow.vocab_size));
  }
}

}  // namespace

ad::Node embed_sentences(ad::Node a, const std::vector<BagOfWords>& sentences) {
  std::vector<ad::SparseColumn> cols;
  cols.reserve(sentences.size());
  for (const auto& s : sentences) {
    check_width(a, s);
    cols.push_back(s.counts);
  }
  return ad::sparse_embed(a, std::move(cols));
}

ad::Node embed_question(ad::Node b, const BagOfWords& question) {
  check_width(b, question);
  return ad::sparse_embed(b, {question.counts});
}

PretrainedMatrix load_pretrained(const std::string& path, const corpus::Vocabulary& vocab,
                                 std::size_t dim, double init_std, std::mt19937_64& rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open pretrained vectors " + path);

  const auto n = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(dim);
  PretrainedMatrix out;
  out.matrix = ad::Matrix::Zero(d, n);
  std::vector<bool> seen(vocab.size(), false);

  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<double> values;
    double v = 0.0;
    while (ls >> v) values.push_back(v);
    if (!ls.eof()) throw FormatError("non-numeric entry in vector for '" + token + "'", line_start);
    if (values.size() != dim) {
      throw FormatError("vector for '" + token + "' has " + std::to_string(values.size()) +
                            " entries, expected " + std::to_string(dim),
                        line_start);
    }
    if (auto idx = vocab.find(token); idx && !seen[*idx]) {
      seen[*idx] = true;
      for (Eigen::Index r = 0; r < d; ++r) {
        out.matrix(r, static_cast<Eigen::Index>(*idx)) = values[static_cast<std::size_t>(r)];
      }
      ++out.covered;
    }
  }

  std::normal_distribution<double> normal(0.0, init_std);
  for (Eigen::Index c = 0; c < n; ++c) {
    if (seen[static_cast<std::size_t>(c)]) continue;
    for (Eigen::Index r = 0; r < d; ++r) out.matrix(r, c) = normal(rng);
  }
  out.coverage = static_cast<double>(out.covered) / static_cast<double>(vocab.size());
  if (out.covered == 0) {
    std::clog << "warning: pretrained vectors in " << path << " cover no vocabulary token\n";
  }
  return out;
}

}  // namespace ltmn::embedding
