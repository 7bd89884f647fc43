#include "ltmn/answer.hpp"

#include "ltmn/errors.hpp"

namespace ltmn::answer {

namespace {

ad::Parameter zero_param(const char* name, std::size_t rows, std::size_t cols) {
  return ad::Parameter(name, ad::Matrix::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols)));
}

void expect_shape(const ad::Parameter& p, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(p.value.rows()) != rows ||
      static_cast<std::size_t>(p.value.cols()) != cols) {
    throw DimensionError(p.name + " is " + ad::shape_str(p.value) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

DecoderParameters DecoderParameters::zeros(std::size_t vocab_size, std::size_t dim,
                                           std::size_t input_dim, std::size_t hidden) {
  if (hidden < 1) throw ContractError("decoder hidden width must be at least 1");
  DecoderParameters p;
  p.init_w = zero_param("W_init", vocab_size, dim);
  p.init_b = zero_param("b_init", vocab_size, 1);
  p.w_iv = zero_param("W_iv", hidden, input_dim);
  p.w_fv = zero_param("W_fv", hidden, input_dim);
  p.w_ov = zero_param("W_ov", hidden, input_dim);
  p.w_sv = zero_param("W_sv", hidden, input_dim);
  p.w_im = zero_param("W_im", hidden, hidden);
  p.w_fm = zero_param("W_fm", hidden, hidden);
  p.w_om = zero_param("W_om", hidden, hidden);
  p.w_sm = zero_param("W_sm", hidden, hidden);
  p.b_i = zero_param("b_i", hidden, 1);
  p.b_f = zero_param("b_f", hidden, 1);
  p.b_gate_o = zero_param("b_gate_o", hidden, 1);
  p.vocab_w = zero_param("W_vocab", vocab_size, hidden);
  p.vocab_b = zero_param("b_vocab", vocab_size, 1);
  return p;
}

std::vector<ad::Parameter*> DecoderParameters::all() {
  return {&init_w, &init_b, &w_iv, &w_fv, &w_ov, &w_sv, &w_im, &w_fm,
          &w_om,   &w_sm,   &b_i,  &b_f,  &b_gate_o, &vocab_w, &vocab_b};
}

void DecoderParameters::validate() const {
  const std::size_t v = vocab_size();
  const std::size_t h = hidden();
  const std::size_t in = input_dim();
  if (h < 1) throw DimensionError("decoder hidden width must be at least 1");
  expect_shape(init_w, v, dim());
  expect_shape(init_b, v, 1);
  for (const auto* p : {&w_iv, &w_fv, &w_ov, &w_sv}) expect_shape(*p, h, in);
  for (const auto* p : {&w_im, &w_fm, &w_om, &w_sm}) expect_shape(*p, h, h);
  for (const auto* p : {&b_i, &b_f, &b_gate_o}) expect_shape(*p, h, 1);
  expect_shape(vocab_w, v, h);
  expect_shape(vocab_b, v, 1);
}

DecoderState DecoderState::initial(ad::Graph& g, std::size_t hidden) {
  const auto h = static_cast<Eigen::Index>(hidden);
  return DecoderState{g.constant(ad::Matrix::Zero(h, 1)), g.constant(ad::Matrix::Zero(h, 1)), 0};
}

ad::Node init_answer(ad::Node o, ad::Node u, DecoderParameters& params) {
  ad::Graph& g = *o.graph();
  if (o.rows() != u.rows() || o.cols() != 1 || u.cols() != 1) {
    throw DimensionError("init_answer: o " + ad::shape_str(o.value()) + " vs u " +
                         ad::shape_str(u.value()));
  }
  ad::Node logits =
      ad::add(ad::matmul(g.parameter(params.init_w), ad::add(o, u)), g.parameter(params.init_b));
  return ad::softmax(logits);
}

ad::Node embed_input(ad::Node embedding, ad::Node distribution) {
  return ad::matmul(embedding, distribution);
}

ad::Node embed_input(ad::Node embedding, std::size_t word) { return ad::column(embedding, word); }

template <CellVariant Variant>
StepResult lstm_step(ad::Node input, const DecoderState& state, DecoderParameters& params) {
  ad::Graph& g = *input.graph();
  auto affine = [&](ad::Parameter& wv, ad::Parameter& wm) {
    return ad::add(ad::matmul(g.parameter(wv), input), ad::matmul(g.parameter(wm), state.output));
  };
  ad::Node i_gate = ad::sigmoid(ad::add(affine(params.w_iv, params.w_im), g.parameter(params.b_i)));
  ad::Node f_gate = ad::sigmoid(ad::add(affine(params.w_fv, params.w_fm), g.parameter(params.b_f)));
  ad::Node o_gate =
      ad::sigmoid(ad::add(affine(params.w_ov, params.w_om), g.parameter(params.b_gate_o)));
  ad::Node candidate = ad::tanh_op(affine(params.w_sv, params.w_sm));
  ad::Node cell = ad::add(ad::hadamard(f_gate, state.cell), ad::hadamard(i_gate, candidate));
  ad::Node out;
  if constexpr (Variant == CellVariant::Printed) {
    out = ad::hadamard(o_gate, cell);
  } else {
    out = ad::hadamard(o_gate, ad::tanh_op(cell));
  }
  ad::Node logits =
      ad::add(ad::matmul(g.parameter(params.vocab_w), out), g.parameter(params.vocab_b));
  return StepResult{DecoderState{cell, out, state.t + 1}, logits};
}

template StepResult lstm_step<CellVariant::Printed>(ad::Node, const DecoderState&,
                                                    DecoderParameters&);
template StepResult lstm_step<CellVariant::Standard>(ad::Node, const DecoderState&,
                                                     DecoderParameters&);

std::size_t argmax(const ad::Matrix& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v.data()[i] > v.data()[best]) best = static_cast<std::size_t>(i);
  }
  return best;
}

Decoded decode_greedy(ad::Node o, ad::Node u, ad::Node embedding, DecoderParameters& params,
                      std::size_t max_len, std::size_t eos) {
  if (max_len < 1) throw ContractError("max_len must be at least 1");
  ad::Graph& g = *o.graph();
  Decoded out;
  ad::Node a0 = init_answer(o, u, params);
  DecoderState state = DecoderState::initial(g, params.hidden());
  ad::Node input = embed_input(embedding, a0);
  for (std::size_t step = 0; step < max_len; ++step) {
    StepResult r = lstm_step(input, state, params);
    out.logits.push_back(r.logits);
    const std::size_t word = argmax(r.logits.value());
    if (word == eos) break;
    out.words.push_back(word);
    state = r.state;
    input = embed_input(embedding, word);
  }
  return out;
}

}  // namespace ltmn::answer
