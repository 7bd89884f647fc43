#pragma once

// Bag-of-words sentence encoding and the A/B embedding products.

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ltmn/autodiff.hpp"
#include "ltmn/corpus.hpp"

namespace ltmn::embedding {

struct EmbeddingConfig {
  std::size_t dim = 100;
  // Questions are embedded with A instead of a separate B.
  bool tie_a_b = false;
  std::optional<std::string> pretrained_path;

  void validate() const;
};

// Token counts over the vocabulary, kept sparse and sorted by index.
struct BagOfWords {
  std::size_t vocab_size = 0;
  ad::SparseColumn counts;

  double count(std::size_t index) const;
  ad::Matrix dense() const;  // vocab_size x 1
  bool operator==(const BagOfWords&) const = default;
};

// Every token adds one to its index (unknown tokens to <UNK>), and <EOS> is
// added once for the end of the sentence.
BagOfWords encode_bow(const corpus::Tokens& sentence, const corpus::Vocabulary& vocab);

// m_i = A x_i for each sentence, returned as the columns of a d x n node.
ad::Node embed_sentences(ad::Node a, const std::vector<BagOfWords>& sentences);
// u = B q, d x 1.
ad::Node embed_question(ad::Node b, const BagOfWords& question);

struct PretrainedMatrix {
  ad::Matrix matrix;                 // d x |V|
  std::size_t covered = 0;
  double coverage = 0.0;             // covered / |V|
};

// Reads `token v1 ... vd` lines. Vocabulary tokens found in the file take
// their vector as their column; the rest are drawn from N(0, init_std^2).
// Throws FormatError if a line's length disagrees with `dim`.
PretrainedMatrix load_pretrained(const std::string& path, const corpus::Vocabulary& vocab,
                                 std::size_t dim, double init_std, std::mt19937_64& rng);

}  // namespace ltmn::embedding
