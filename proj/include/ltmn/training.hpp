#pragma once

// End-to-end training: Gaussian initialisation, teacher-forced cross-entropy,
// mini-batch SGD with global-norm clipping and best-validation selection.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltmn/autodiff.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/model.hpp"

namespace ltmn::training {

struct TrainingConfig {
  double learning_rate = 0.002;
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  // Weights ~ N(0, 0.1), i.e. standard deviation sqrt(0.1).
  double init_std = std::sqrt(0.1);
  double validation_fraction = 0.10;
  std::uint64_t seed = 1;
  std::size_t hops = 1;
  std::size_t dim = 100;
  std::size_t hidden = 0;          // 0: same as dim
  std::size_t max_len = 5;
  double grad_clip = 40.0;
  bool tie_a_b = false;
  std::optional<std::string> pretrained_path;

  void validate() const;
  ModelConfig model() const;
};

// With a pretrained file, `covered` (if given) receives the number of
// vocabulary tokens found in it.
ModelParameters init_parameters(const TrainingConfig& config, const corpus::Vocabulary& vocab,
                                std::size_t* covered = nullptr);

// Sum of per-step cross-entropies with teacher forcing: step 1 reads E a_0,
// step t > 1 reads the gold word t-1; targets are the gold words followed by
// <EOS>. Answers longer than max_len are truncated with a warning.
ad::Node example_loss(ad::Graph& g, ModelParameters& params, const EncodedInstance& x,
                      const ModelConfig& config);

double global_grad_norm(std::span<ad::Parameter* const> params);
// Rescales gradients so their global norm is at most max_norm. Returns the
// norm before clipping.
double clip_global_norm(std::span<ad::Parameter* const> params, double max_norm);
void sgd_step(std::span<ad::Parameter* const> params, double learning_rate);

struct EpochRecord {
  std::size_t epoch = 0;       // 1-based
  double train_loss = 0.0;     // mean per-example loss over the epoch
  double val_ema = 0.0;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  corpus::Vocabulary vocab;
  ModelParameters initial;
  ModelParameters best;
  std::size_t best_epoch = 0;  // 0: the initial parameters
  double best_val_ema = 0.0;
  std::vector<EpochRecord> log;
  std::vector<corpus::QAInstance> train_set;
  std::vector<corpus::QAInstance> validation_set;
  std::optional<std::size_t> pretrained_covered;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Splits off validation_fraction of `dataset`, builds the vocabulary over the
// whole dataset, and trains. With epochs == 0 the initial parameters are
// returned and the log is empty. Throws NumericError naming the epoch and
// batch if a loss turns non-finite.
TrainResult train(const std::vector<corpus::QAInstance>& dataset, const TrainingConfig& config,
                  const EpochCallback& on_epoch = {});

// `epoch<TAB>train_loss<TAB>val_ema` lines.
void write_epoch_log(std::ostream& out, const std::vector<EpochRecord>& log);

}  // namespace ltmn::training
