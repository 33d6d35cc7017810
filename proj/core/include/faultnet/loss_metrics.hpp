#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "faultnet/tensor.hpp"

namespace faultnet {

/// Probabilities are clamped to [kProbabilityFloor, 1 - kProbabilityFloor]
/// before any logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

enum class CrossEntropyForm {
  /// Per-class binary terms summed over all N classes:
  /// -(1/q) sum_i sum_j [1{y=j} log p_j + (1 - 1{y=j}) log(1 - p_j)].
  per_class_binary,
  /// Standard categorical form -(1/q) sum_i log p_y.
  categorical,
};

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // w.r.t. logits [q x N] for cross entropy, estimates [q] for least squares
};

/// probs: softmax outputs [q x N]; labels in [0, N). The gradient is taken
/// through the softmax, i.e. with respect to the logits.
LossResult cross_entropy_loss(const Tensor& probs, std::span<const int> labels,
                              CrossEntropyForm form = CrossEntropyForm::per_class_binary);

/// One sample's contribution, pre-scaled by `weight` (1/q for a batch mean).
/// Writes d(contribution)/d(logits) into grad_logits and returns the
/// contribution. Validation is the caller's job.
double cross_entropy_sample(std::span<const double> probs, int label, double weight,
                            std::span<double> grad_logits, CrossEntropyForm form);

/// L = (1/q) sum (y - y_est)^2, grad_k = -2 (y_k - y_est_k) / q.
LossResult least_squares_loss(std::span<const double> estimates, std::span<const double> targets);

// Metrics ---------------------------------------------------------------------

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn_ = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn_ + tn; }
};

/// One-vs-rest metrics with a designated positive class. precision/recall
/// are empty when their denominator is zero.
struct ClassificationReport {
  std::size_t num_samples = 0;
  std::size_t num_classes = 0;
  std::size_t positive_class = 0;
  ConfusionCounts counts;
  double accuracy = 0.0;          // (TP + TN) / q, one-vs-rest
  double overall_accuracy = 0.0;  // trace(confusion) / q
  std::optional<double> precision;
  std::optional<double> recall;
  std::vector<std::vector<std::size_t>> confusion_matrix;  // [true][predicted]
};

struct RegressionReport {
  std::size_t num_samples = 0;
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> r2;  // empty when fewer than 2 samples or constant targets
};

using MetricsReport = std::variant<ClassificationReport, RegressionReport>;

/// num_classes == 0 infers max(label, prediction) + 1.
ClassificationReport classification_metrics(std::span<const int> predictions,
                                            std::span<const int> labels,
                                            std::size_t positive_class = 0,
                                            std::size_t num_classes = 0);

RegressionReport regression_metrics(std::span<const double> estimates,
                                    std::span<const double> targets);

/// JSON document for a report. Undefined values serialize as null.
std::string to_json(const MetricsReport& report, const std::vector<std::string>& class_names = {});

/// Aligned plain-text table: Accuracy/Precision/Recall rows for
/// classification (percentages), MSE/MAE/R2/RMSE for regression.
std::string format_table(const MetricsReport& report, const std::string& task_name,
                         const std::vector<std::string>& class_names = {});

}  // namespace faultnet
