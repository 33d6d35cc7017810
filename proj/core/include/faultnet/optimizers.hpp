#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "faultnet/tensor.hpp"

namespace faultnet {

enum class OptimizerKind { sgd, adam };

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws a config error on out-of-range values.
  void validate() const;
};

/// Moments are shaped like the parameters they track; `step` counts
/// applied updates.
struct OptimizerState {
  OptimizerConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::size_t step = 0;
};

OptimizerState make_optimizer_state(const OptimizerConfig& config, std::span<const Tensor> params);

/// theta <- theta - lr * g. `names` (optional) label parameters in errors.
std::vector<Tensor> sgd_step(std::span<const Tensor> params, std::span<const Tensor> grads,
                             double learning_rate, std::span<const std::string> names = {});

/// Bias-corrected Adam update; advances state.step by one.
std::vector<Tensor> adam_step(OptimizerState& state, std::span<const Tensor> params,
                              std::span<const Tensor> grads, std::span<const std::string> names = {});

/// Dispatches on state.config.kind. SGD also advances state.step.
std::vector<Tensor> optimizer_step(OptimizerState& state, std::span<const Tensor> params,
                                   std::span<const Tensor> grads,
                                   std::span<const std::string> names = {});

}  // namespace faultnet
