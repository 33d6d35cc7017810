#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "faultnet/data_pipeline.hpp"
#include "faultnet/layers.hpp"
#include "faultnet/tensor.hpp"

namespace faultnet {

enum class Task { classification, regression };

const char* to_string(Task task);

/// Declarative architecture: an ordered layer list ending in exactly one head.
struct ModelConfig {
  std::vector<LayerSpec> layers;

  Task task() const;
  bool operator==(const ModelConfig&) const = default;
};

ModelConfig model_config_from_json(std::string_view text);
std::string to_json(const ModelConfig& config);

struct ReluLayer {};
struct FlattenLayer {};

using Layer = std::variant<Conv1DLayer, ReluLayer, MaxPool1DLayer, FlattenLayer, DenseLayer>;

/// A shape-checked network. Inference members are const and cache-free;
/// forward_train/backward record activations and accumulate gradients, so a
/// model being trained must be owned by one thread.
class Model {
 public:
  Model() = default;

  const ModelConfig& config() const noexcept { return config_; }
  const Shape& input_shape() const noexcept { return input_shape_; }
  Task task() const { return config_.task(); }
  std::size_t head_width() const noexcept { return head_width_; }
  const LabelMap& labels() const noexcept { return labels_; }
  const std::optional<StandardizationStats>& standardization() const noexcept { return stats_; }
  void set_standardization(std::optional<StandardizationStats> stats);
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  /// Applies the stored standardization (identity when none) after checking
  /// the window shape.
  Tensor preprocess(const Tensor& window) const;

  /// Pre-head outputs [head_width] for an already preprocessed window.
  Tensor logits(const Tensor& input) const;
  /// Softmax probabilities or the [1] sigmoid estimate.
  Tensor apply_head(const Tensor& logits) const;
  /// Input of the final dense layer for an already preprocessed window.
  Tensor penultimate(const Tensor& input) const;

  /// Like logits(), but records what backward() needs.
  Tensor forward_train(const Tensor& input);
  /// Accumulates parameter gradients for d(loss)/d(logits).
  void backward(const Tensor& grad_logits);

  std::vector<Tensor> parameters() const;
  std::vector<std::string> parameter_names() const;
  /// Throws a build error when count or any shape disagrees.
  void set_parameters(const std::vector<Tensor>& params);
  std::vector<Tensor> gradients() const;
  void zero_gradients();
  std::size_t parameter_count() const;

 private:
  friend Model build_model(const ModelConfig&, const Shape&, const LabelMap&, std::uint64_t);

  ModelConfig config_;  // dense units resolved
  Shape input_shape_;
  std::size_t head_width_ = 0;
  LabelMap labels_;
  std::optional<StandardizationStats> stats_;
  std::vector<Layer> layers_;

  std::vector<Tensor> tape_;                   // input of every layer, last forward_train
  std::vector<std::vector<double>> grad_acc_;  // parallel to parameters()
};

/// Builds and initializes a model for windows of `input_shape`
/// ([channels x length]). Classification heads get one output per label;
/// regression heads get one. Layer mismatches raise a build error naming
/// both layers and shapes.
Model build_model(const ModelConfig& config, const Shape& input_shape, const LabelMap& labels,
                  std::uint64_t seed);

}  // namespace faultnet
