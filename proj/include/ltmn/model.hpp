#pragma once

// The assembled network: bag-of-words inputs embedded by A (and B for the
// question), attention over the sentence memories, and the answer decoder
// whose word inputs are also read from A.

#include <cstddef>
#include <vector>

#include "ltmn/answer.hpp"
#include "ltmn/autodiff.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/embedding.hpp"

namespace ltmn {

struct ModelConfig {
  std::size_t dim = 100;
  std::size_t hidden = 100;
  std::size_t hops = 1;
  std::size_t max_len = 5;
  bool tie_a_b = false;

  void validate() const;
};

struct ModelParameters {
  ad::Parameter a;   // d x |V|, sentences and decoder word inputs
  ad::Parameter b;   // d x |V|, questions; unused when tied
  bool tied = false;
  answer::DecoderParameters decoder;

  static ModelParameters zeros(std::size_t vocab_size, const ModelConfig& config);

  ad::Parameter& question_embedding() { return tied ? a : b; }
  std::size_t vocab_size() const { return static_cast<std::size_t>(a.value.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(a.value.rows()); }
  // Every learnable matrix, each exactly once, in a fixed order.
  std::vector<ad::Parameter*> all();
  std::vector<const ad::Parameter*> all() const;
  void zero_grad();
  void validate() const;
};

struct EncodedInstance {
  std::vector<embedding::BagOfWords> context;
  embedding::BagOfWords question;
  std::vector<std::size_t> answer;
};

EncodedInstance encode_instance(const corpus::QAInstance& qa, const corpus::Vocabulary& vocab);

struct MemoryForward {
  ad::Node memories;                 // d x n
  ad::Node question;                 // u, d x 1
  ad::Node output;                   // o^K
  ad::Node query;                    // u^K
  std::vector<ad::Node> attention;   // one n x 1 distribution per hop
};

MemoryForward forward_memory(ad::Graph& g, ModelParameters& params, const EncodedInstance& x,
                             std::size_t hops);

struct Prediction {
  std::vector<std::size_t> words;
  std::vector<std::vector<double>> attention;   // per hop, per sentence
};

Prediction predict(ModelParameters& params, const EncodedInstance& x, const ModelConfig& config);

}  // namespace ltmn
