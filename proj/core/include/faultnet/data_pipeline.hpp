#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "faultnet/tensor.hpp"

namespace faultnet {

/// Class index (classification) or scalar value (regression).
using Target = std::variant<int, double>;

int class_of(const Target& target);
double value_of(const Target& target);

/// One sensor recording, series shaped [channels x length].
struct RawRecording {
  Tensor series;
  Target target;
  std::string source_id;
};

/// A fixed-length window, shaped [channels x window_len].
struct Sample {
  Tensor window;
  Target target;
};

/// Ordered bijection between class names and indices.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> names);

  /// Index of name, appending it when unseen.
  int intern(const std::string& name);
  /// Throws a label error for unknown names.
  int index_of(const std::string& name) const;
  const std::string& name_of(int index) const;
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const LabelMap&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Consecutive non-overlapping windows; a tail shorter than window_len is
/// dropped. Every window inherits the recording's target.
std::vector<Sample> segment(const RawRecording& recording, std::size_t window_len);

/// Keeps only the first n measurements of every channel.
RawRecording crop_head(const RawRecording& recording, std::size_t n);

/// Per-channel z-score parameters. A channel with zero spread is only
/// shifted by its mean and flagged as degenerate.
struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> degenerate;

  std::size_t channels() const noexcept { return mean.size(); }
  bool any_degenerate() const;
  bool operator==(const StandardizationStats&) const = default;
};

/// Fits per-channel statistics. Pass the training split only.
StandardizationStats fit_standardization(std::span<const Sample> train);

Tensor apply_standardization(const Tensor& window, const StandardizationStats& stats);
std::vector<Sample> apply_standardization(std::span<const Sample> samples,
                                          const StandardizationStats& stats);

/// x * std + mean, per channel.
Tensor invert_standardization(const Tensor& window, const StandardizationStats& stats);

/// Applies the given stats, or fits them on `samples` when absent.
std::pair<std::vector<Sample>, StandardizationStats> standardize(
    std::span<const Sample> samples, const std::optional<StandardizationStats>& stats = std::nullopt);

struct SplitDataset {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<std::size_t> train_indices;       // positions in the input list
  std::vector<std::size_t> validation_indices;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
};

/// round-half-up(train_fraction * n).
std::size_t train_count(std::size_t n, double train_fraction);

/// Seeded shuffle, then the first train_count() go to training.
SplitDataset split(std::span<const Sample> samples, double train_fraction, std::uint64_t seed);

/// Rebuilds a split from stored index lists.
SplitDataset split_from_indices(std::span<const Sample> samples, std::vector<std::size_t> train_indices,
                                std::vector<std::size_t> validation_indices, std::uint64_t seed,
                                double train_fraction);

}  // namespace faultnet
