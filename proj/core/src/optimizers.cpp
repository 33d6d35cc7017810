#include "faultnet/optimizers.hpp"

#include <cmath>

#include "faultnet/error.hpp"

namespace faultnet {

namespace {

std::string param_name(std::span<const std::string> names, std::size_t i) {
  return i < names.size() ? names[i] : "parameter " + std::to_string(i);
}

void check_pairs(std::span<const Tensor> params, std::span<const Tensor> grads,
                 std::span<const std::string> names) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::shape_mismatch, std::to_string(params.size()) + " parameters but " +
                                               std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape()) {
      throw Error(ErrorCode::shape_mismatch, param_name(names, i) + ": parameter shape " +
                                                 params[i].shape().to_string() +
                                                 " vs gradient shape " +
                                                 grads[i].shape().to_string());
    }
    if (!grads[i].all_finite()) {
      throw Error(ErrorCode::numeric, param_name(names, i) + ": non-finite gradient");
    }
  }
}

}  // namespace

const char* to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw Error(ErrorCode::config, "unknown optimizer '" + name + "' (expected sgd or adam)");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::config, "learning_rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::config, "adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::config, "adam epsilon must be positive");
}

OptimizerState make_optimizer_state(const OptimizerConfig& config, std::span<const Tensor> params) {
  config.validate();
  OptimizerState state;
  state.config = config;
  if (config.kind == OptimizerKind::adam) {
    for (const Tensor& p : params) {
      state.first_moment.push_back(zeros_like(p));
      state.second_moment.push_back(zeros_like(p));
    }
  }
  return state;
}

std::vector<Tensor> sgd_step(std::span<const Tensor> params, std::span<const Tensor> grads,
                             double learning_rate, std::span<const std::string> names) {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::config, "learning_rate must be positive");
  check_pairs(params, grads, names);
  std::vector<Tensor> updated;
  updated.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto theta = params[i].values();
    const auto g = grads[i].values();
    std::vector<double> next(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) next[k] = theta[k] - learning_rate * g[k];
    updated.emplace_back(params[i].shape(), std::move(next));
  }
  return updated;
}

std::vector<Tensor> adam_step(OptimizerState& state, std::span<const Tensor> params,
                              std::span<const Tensor> grads, std::span<const std::string> names) {
  check_pairs(params, grads, names);
  const OptimizerConfig& cfg = state.config;
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw Error(ErrorCode::state, "adam state tracks " + std::to_string(state.first_moment.size()) +
                                      " tensors, got " + std::to_string(params.size()));
  }
  const std::size_t t = state.step + 1;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

  std::vector<Tensor> updated;
  updated.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.first_moment[i].shape() != params[i].shape()) {
      throw Error(ErrorCode::shape_mismatch, param_name(names, i) + ": moment shape " +
                                                 state.first_moment[i].shape().to_string() +
                                                 " vs parameter " + params[i].shape().to_string());
    }
    const auto theta = params[i].values();
    const auto g = grads[i].values();
    std::vector<double> m(state.first_moment[i].values().begin(), state.first_moment[i].values().end());
    std::vector<double> v(state.second_moment[i].values().begin(), state.second_moment[i].values().end());
    std::vector<double> next(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      next[k] = theta[k] - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    state.first_moment[i] = Tensor(params[i].shape(), std::move(m));
    state.second_moment[i] = Tensor(params[i].shape(), std::move(v));
    updated.emplace_back(params[i].shape(), std::move(next));
  }
  state.step = t;
  return updated;
}

std::vector<Tensor> optimizer_step(OptimizerState& state, std::span<const Tensor> params,
                                   std::span<const Tensor> grads, std::span<const std::string> names) {
  if (state.config.kind == OptimizerKind::adam) return adam_step(state, params, grads, names);
  auto updated = sgd_step(params, grads, state.config.learning_rate, names);
  ++state.step;
  return updated;
}

}  // namespace faultnet
