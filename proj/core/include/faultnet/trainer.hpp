#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faultnet/data_pipeline.hpp"
#include "faultnet/loss_metrics.hpp"
#include "faultnet/model.hpp"
#include "faultnet/optimizers.hpp"

namespace faultnet {

enum class LossKind { cross_entropy, categorical_cross_entropy, least_squares };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t batch_size = 32;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::cross_entropy;
  std::size_t eval_every = 50;

  void validate() const;
  /// Throws a config error when the loss does not fit the model head.
  void check_compatible(const Model& model) const;
};

TrainConfig train_config_from_json(std::string_view text);
std::string to_json(const TrainConfig& config);

struct LogRow {
  std::size_t iteration = 0;
  double train_loss = 0.0;
  std::optional<double> val_metric;  // overall accuracy or RMSE

  bool operator==(const LogRow&) const = default;
};

struct TrainingLog {
  std::vector<LogRow> rows;

  /// Header `iteration,train_loss,val_metric`; blank metric when not evaluated.
  std::string to_csv() const;
  bool operator==(const TrainingLog&) const = default;
};

/// Everything needed to continue a run exactly where it stopped.
struct TrainingState {
  Model model;
  OptimizerState optimizer;
  std::size_t iteration = 0;
};

TrainingState start_training(Model model, const TrainConfig& config);

struct TrainResult {
  TrainingState state;
  TrainingLog log;
};

/// Runs mini-batch iterations until state.iteration == config.max_iterations.
/// Samples are raw; the model's standardization is applied internally.
/// Batches walk a fresh seeded permutation each epoch, so the batch for a
/// given iteration depends only on (seed, iteration).
TrainResult train(TrainingState state, const SplitDataset& split, const TrainConfig& config);

/// Convenience wrapper starting from a fresh optimizer.
TrainResult train(Model model, const SplitDataset& split, const TrainConfig& config);

/// Indices of the training batch used at 1-based `iteration`.
std::vector<std::size_t> batch_indices(std::size_t num_samples, std::size_t batch_size,
                                       std::uint64_t seed, std::size_t iteration);

/// Forward-only evaluation; never modifies the model.
MetricsReport evaluate(const Model& model, std::span<const Sample> samples);

struct Prediction {
  int label = -1;              // classification only
  double confidence = 0.0;     // probability of `label`
  Tensor probabilities;        // classification only
  double estimate = 0.0;       // regression only
  double latency_ms = 0.0;
};

/// Single raw window, standardized with the model's stats.
Prediction predict(const Model& model, const Tensor& window);

struct FeatureExport {
  std::vector<Target> targets;
  std::vector<Target> predictions;
  std::vector<std::vector<double>> features;       // penultimate activations
  std::vector<std::array<double, 2>> projection;   // (pc1, pc2)
  std::array<std::vector<double>, 2> components;   // orthonormal principal axes

  /// Columns: sample_id,label,prediction,pc1,pc2,f0..f{D-1}.
  std::string to_csv(const LabelMap& labels) const;
};

/// Penultimate features plus a 2-component PCA projection.
FeatureExport export_features(const Model& model, std::span<const Sample> samples);

}  // namespace faultnet
