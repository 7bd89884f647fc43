#include "ltmn/training.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>

#include "ltmn/answer.hpp"
#include "ltmn/embedding.hpp"
#include "ltmn/errors.hpp"
#include "ltmn/metrics.hpp"

namespace ltmn::training {

void TrainingConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ContractError("learning_rate must be non-negative");
  if (batch_size < 1) throw ContractError("batch_size must be at least 1");
  if (!(init_std > 0.0)) throw ContractError("init_std must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ContractError("validation_fraction must lie in (0, 1)");
  }
  if (!(grad_clip > 0.0)) throw ContractError("grad_clip must be positive");
  model().validate();
}

ModelConfig TrainingConfig::model() const {
  ModelConfig m;
  m.dim = dim;
  m.hidden = hidden == 0 ? dim : hidden;
  m.hops = hops;
  m.max_len = max_len;
  m.tie_a_b = tie_a_b;
  return m;
}

ModelParameters init_parameters(const TrainingConfig& config, const corpus::Vocabulary& vocab,
                                std::size_t* covered) {
  config.validate();
  ModelParameters p = ModelParameters::zeros(vocab.size(), config.model());
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, config.init_std);
  for (ad::Parameter* param : p.all()) {
    // Biases start at zero.
    if (param->value.cols() == 1) continue;
    for (Eigen::Index i = 0; i < param->value.size(); ++i) param->value.data()[i] = normal(rng);
  }
  if (config.pretrained_path) {
    embedding::PretrainedMatrix pre = embedding::load_pretrained(*config.pretrained_path, vocab,
                                                                 config.dim, config.init_std, rng);
    if (covered) *covered = pre.covered;
    p.a.value = pre.matrix;
    if (!p.tied) p.b.value = pre.matrix;
  }
  return p;
}

ad::Node example_loss(ad::Graph& g, ModelParameters& params, const EncodedInstance& x,
                      const ModelConfig& config) {
  MemoryForward f = forward_memory(g, params, x, config.hops);
  ad::Node e = g.parameter(params.a);

  std::vector<std::size_t> targets = x.answer;
  if (targets.size() > config.max_len) {
    std::clog << "warning: answer of " << targets.size() << " words truncated to max_len "
              << config.max_len << "\n";
    targets.resize(config.max_len);
  }
  targets.push_back(corpus::Vocabulary::kEos);

  ad::Node a0 = answer::init_answer(f.output, f.query, params.decoder);
  answer::DecoderState state = answer::DecoderState::initial(g, params.decoder.hidden());
  ad::Node input = answer::embed_input(e, a0);
  ad::Node loss;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    answer::StepResult r = answer::lstm_step(input, state, params.decoder);
    ad::Node step_loss = ad::cross_entropy(ad::softmax(r.logits), targets[t]);
    loss = t == 0 ? step_loss : ad::add(loss, step_loss);
    state = r.state;
    input = answer::embed_input(e, targets[t]);
  }
  return loss;
}

double global_grad_norm(std::span<ad::Parameter* const> params) {
  double sq = 0.0;
  for (const ad::Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(std::span<ad::Parameter* const> params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (ad::Parameter* p : params) p->grad *= scale;
  }
  return norm;
}

void sgd_step(std::span<ad::Parameter* const> params, double learning_rate) {
  for (ad::Parameter* p : params) p->value.noalias() -= learning_rate * p->grad;
}

TrainResult train(const std::vector<corpus::QAInstance>& dataset, const TrainingConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.empty()) throw ContractError("training set is empty");
  const ModelConfig mc = config.model();

  TrainResult result;
  auto [train_set, val_set] =
      corpus::split_train_validation(dataset, config.validation_fraction, config.seed);
  result.vocab = corpus::build_vocabulary(dataset);
  std::size_t covered = 0;
  result.initial = init_parameters(config, result.vocab, &covered);
  if (config.pretrained_path) result.pretrained_covered = covered;
  result.train_set = std::move(train_set);
  result.validation_set = std::move(val_set);

  std::vector<EncodedInstance> encoded;
  encoded.reserve(result.train_set.size());
  for (const auto& qa : result.train_set) encoded.push_back(encode_instance(qa, result.vocab));

  ModelParameters params = result.initial;
  std::vector<ad::Parameter*> plist = params.all();
  result.best = params;
  result.best_epoch = 0;
  result.best_val_ema = -1.0;

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      params.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        ad::Graph g;
        double value;
        try {
          ad::Node loss = example_loss(g, params, encoded[order[k]], mc);
          value = loss.scalar();
          g.backward(loss);
        } catch (const NumericError& err) {
          throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index) + ": " + err.what());
        }
        loss_sum += value;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (ad::Parameter* p : plist) p->grad *= inv;
      clip_global_norm(plist, config.grad_clip);
      sgd_step(plist, config.learning_rate);
      for (ad::Parameter* p : plist) {
        if (!p->value.allFinite()) {
          throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index) + ": non-finite " + p->name +
                             " after update");
        }
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    try {
      rec.val_ema = metrics::evaluate(params, result.vocab, result.validation_set, mc).ema;
    } catch (const NumericError& err) {
      throw NumericError("epoch " + std::to_string(epoch) + ", validation: " + err.what());
    }
    result.log.push_back(rec);
    if (rec.val_ema > result.best_val_ema) {
      result.best_val_ema = rec.val_ema;
      result.best_epoch = epoch;
      result.best = params;
    }
    if (on_epoch) on_epoch(rec);
  }

  if (result.best_epoch == 0) {
    result.best_val_ema =
        metrics::evaluate(result.best, result.vocab, result.validation_set, mc).ema;
  }
  result.best.zero_grad();
  return result;
}

void write_epoch_log(std::ostream& out, const std::vector<EpochRecord>& log) {
  out << std::setprecision(17);
  for (const auto& r : log) out << r.epoch << '\t' << r.train_loss << '\t' << r.val_ema << '\n';
}

}  // namespace ltmn::training
