#include "ltmn/model.hpp"

#include "ltmn/errors.hpp"
#include "ltmn/memory.hpp"

namespace ltmn {

void ModelConfig::validate() const {
  if (dim < 1) throw ContractError("dim must be at least 1");
  if (hidden < 1) throw ContractError("hidden must be at least 1");
  if (hops < 1) throw ContractError("hops must be at least 1");
  if (max_len < 1) throw ContractError("max_len must be at least 1");
}

ModelParameters ModelParameters::zeros(std::size_t vocab_size, const ModelConfig& config) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.dim);
  const auto v = static_cast<Eigen::Index>(vocab_size);
  ModelParameters p;
  p.a = ad::Parameter("A", ad::Matrix::Zero(d, v));
  p.tied = config.tie_a_b;
  p.b = p.tied ? ad::Parameter("B", ad::Matrix::Zero(0, 0)) : ad::Parameter("B", ad::Matrix::Zero(d, v));
  p.decoder = answer::DecoderParameters::zeros(vocab_size, config.dim, config.dim, config.hidden);
  return p;
}

std::vector<ad::Parameter*> ModelParameters::all() {
  std::vector<ad::Parameter*> out{&a};
  if (!tied) out.push_back(&b);
  for (auto* p : decoder.all()) out.push_back(p);
  return out;
}

std::vector<const ad::Parameter*> ModelParameters::all() const {
  auto mut = const_cast<ModelParameters*>(this)->all();
  return {mut.begin(), mut.end()};
}

void ModelParameters::zero_grad() {
  for (auto* p : all()) p->zero_grad();
}

void ModelParameters::validate() const {
  if (!tied && (b.value.rows() != a.value.rows() || b.value.cols() != a.value.cols())) {
    throw DimensionError("B is " + ad::shape_str(b.value) + " but A is " + ad::shape_str(a.value));
  }
  decoder.validate();
  if (decoder.vocab_size() != vocab_size() || decoder.input_dim() != dim() ||
      decoder.dim() != dim()) {
    throw DimensionError("decoder shapes do not match the embedding matrix " +
                         ad::shape_str(a.value));
  }
}

EncodedInstance encode_instance(const corpus::QAInstance& qa, const corpus::Vocabulary& vocab) {
  EncodedInstance x;
  x.context.reserve(qa.context.size());
  for (const auto& s : qa.context) x.context.push_back(embedding::encode_bow(s, vocab));
  x.question = embedding::encode_bow(qa.question, vocab);
  x.answer = vocab.encode(qa.answer);
  return x;
}

MemoryForward forward_memory(ad::Graph& g, ModelParameters& params, const EncodedInstance& x,
                             std::size_t hops) {
  MemoryForward f;
  ad::Node a = g.parameter(params.a);
  f.memories = embedding::embed_sentences(a, x.context);
  f.question = embedding::embed_question(g.parameter(params.question_embedding()), x.question);
  memory::HopResult h = memory::hop(f.question, f.memories, hops);
  f.output = h.output;
  f.query = h.query;
  f.attention = std::move(h.attention);
  return f;
}

Prediction predict(ModelParameters& params, const EncodedInstance& x, const ModelConfig& config) {
  ad::Graph g;
  MemoryForward f = forward_memory(g, params, x, config.hops);
  answer::Decoded d = answer::decode_greedy(f.output, f.query, g.parameter(params.a),
                                            params.decoder, config.max_len,
                                            corpus::Vocabulary::kEos);
  Prediction p;
  p.words = std::move(d.words);
  for (const auto& att : f.attention) {
    const auto& v = att.value();
    p.attention.emplace_back(v.data(), v.data() + v.size());
  }
  return p;
}

}  // namespace ltmn
