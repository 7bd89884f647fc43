#pragma once

// Full-model finite-difference check on a fixed tiny instance: two
// statements, a one-word question and a two-word answer, |V| = 12.

#include <vector>

#include "ltmn/autodiff.hpp"
#include "ltmn/corpus.hpp"
#include "ltmn/training.hpp"

namespace ltmn {

std::vector<corpus::QAInstance> tiny_instances();

struct ModelCheckOptions {
  training::TrainingConfig config = [] {
    training::TrainingConfig c;
    c.dim = 8;
    c.hidden = 8;
    return c;
  }();
  double epsilon = 1e-4;
  double tolerance = 1e-4;
  // Scales every analytic gradient by (1 + inject_error) before comparison.
  double inject_error = 0.0;
};

struct ModelCheckResult {
  ad::GradCheckReport report;
  std::size_t vocab_size = 0;
  double seconds = 0.0;
};

ModelCheckResult check_model_gradients(const ModelCheckOptions& options);

}  // namespace ltmn
