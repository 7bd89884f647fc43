#include "ltmn/model_check.hpp"

#include <chrono>

namespace ltmn {

std::vector<corpus::QAInstance> tiny_instances() {
  return corpus::to_instances(
      corpus::parse_babi_string("1 Mary ran.\n2 John sat.\n3 Mary?\tguest room\t1\n"));
}

ModelCheckResult check_model_gradients(const ModelCheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto data = tiny_instances();
  const auto vocab = corpus::build_vocabulary(data);
  ModelParameters params = training::init_parameters(options.config, vocab);
  const EncodedInstance x = encode_instance(data.front(), vocab);
  const ModelConfig mc = options.config.model();

  std::function<void(std::span<ad::Parameter* const>)> hook;
  if (options.inject_error != 0.0) {
    hook = [scale = 1.0 + options.inject_error](std::span<ad::Parameter* const> ps) {
      for (ad::Parameter* p : ps) p->grad *= scale;
    };
  }
  ModelCheckResult result;
  result.report = ad::gradient_check(
      [&](ad::Graph& g) { return training::example_loss(g, params, x, mc); }, params.all(),
      options.epsilon, options.tolerance, hook);
  result.vocab_size = vocab.size();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace ltmn
