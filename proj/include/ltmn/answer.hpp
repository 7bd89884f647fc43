#pragma once

// Answer generation: the <BOA> distribution a_0 built from the memory
// readout, then an LSTM that emits one vocabulary word per step.
//
// The cell follows these equations exactly:
//   i_t = sigmoid(W_iv v_t + W_im y_{t-1} + b_i)
//   f_t = sigmoid(W_fv v_t + W_fm y_{t-1} + b_f)
//   o_t = sigmoid(W_ov v_t + W_om y_{t-1} + b_gate_o)
//   s_t = f_t * s_{t-1} + i_t * tanh(W_sv v_t + W_sm y_{t-1})
//   y_t = o_t * s_t
//   logits_t = W_vocab y_t + b_vocab
// Gates read the previous *output* y_{t-1}, the cell candidate has no bias
// and y_t has no tanh. CellVariant::Standard puts the tanh back on y_t; it is
// only for diagnostics.

#include <cstddef>
#include <vector>

#include "ltmn/autodiff.hpp"

namespace ltmn::answer {

struct DecoderParameters {
  ad::Parameter init_w;    // |V| x d, maps o + u to <BOA> logits
  ad::Parameter init_b;    // |V| x 1
  ad::Parameter w_iv, w_fv, w_ov, w_sv;  // h x d_in
  ad::Parameter w_im, w_fm, w_om, w_sm;  // h x h
  ad::Parameter b_i, b_f, b_gate_o;      // h x 1
  ad::Parameter vocab_w;   // |V| x h
  ad::Parameter vocab_b;   // |V| x 1

  // All-zero parameters of the given sizes, named.
  static DecoderParameters zeros(std::size_t vocab_size, std::size_t dim, std::size_t input_dim,
                                 std::size_t hidden);

  std::size_t vocab_size() const { return static_cast<std::size_t>(vocab_b.value.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(b_i.value.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(w_iv.value.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(init_w.value.cols()); }

  std::vector<ad::Parameter*> all();
  // Throws DimensionError on inconsistent shapes.
  void validate() const;
};

struct DecoderState {
  ad::Node cell;     // s, h x 1
  ad::Node output;   // y, h x 1
  std::size_t t = 0;

  // s_0 = y_0 = 0.
  static DecoderState initial(ad::Graph& g, std::size_t hidden);
};

enum class CellVariant { Printed, Standard };

// a_0 = softmax(init_w (o + u) + init_b), |V| x 1.
ad::Node init_answer(ad::Node o, ad::Node u, DecoderParameters& params);

// Expected embedding E a_0 of the <BOA> distribution.
ad::Node embed_input(ad::Node embedding, ad::Node distribution);
// Embedding of a single word: column `word` of E.
ad::Node embed_input(ad::Node embedding, std::size_t word);

struct StepResult {
  DecoderState state;
  ad::Node logits;   // |V| x 1, before softmax
};

template <CellVariant Variant = CellVariant::Printed>
StepResult lstm_step(ad::Node input, const DecoderState& state, DecoderParameters& params);

extern template StepResult lstm_step<CellVariant::Printed>(ad::Node, const DecoderState&,
                                                           DecoderParameters&);
extern template StepResult lstm_step<CellVariant::Standard>(ad::Node, const DecoderState&,
                                                            DecoderParameters&);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const ad::Matrix& v);

struct Decoded {
  std::vector<std::size_t> words;   // without the terminating <EOS>
  std::vector<ad::Node> logits;     // one per emitted step
};

// Greedy decoding: step 1 reads E a_0, each later step reads the embedding
// of the previously emitted word. Stops after emitting `eos` (not included)
// or after max_len words.
Decoded decode_greedy(ad::Node o, ad::Node u, ad::Node embedding, DecoderParameters& params,
                      std::size_t max_len, std::size_t eos);

}  // namespace ltmn::answer
