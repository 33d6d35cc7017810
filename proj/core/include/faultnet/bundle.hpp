#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "faultnet/data_pipeline.hpp"
#include "faultnet/model.hpp"

namespace faultnet {

inline constexpr const char* kBundleFormat = "faultnet-bundle/1";

struct PrepareOptions {
  std::size_t window_len = 6000;
  std::optional<std::size_t> crop_n;
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
  bool standardize = true;
};

/// Prepared dataset: raw windows, the split, and the statistics fitted on
/// the training side. Windows stay unstandardized on disk.
struct DatasetBundle {
  Task task = Task::classification;
  std::size_t channels = 0;
  std::size_t window_len = 0;
  LabelMap labels;
  std::vector<Sample> samples;
  std::vector<std::string> sources;  // recording id per sample
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
  std::optional<StandardizationStats> stats;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;

  SplitDataset split() const;
  /// Per-class sample counts (classification) in label order.
  std::vector<std::size_t> class_counts() const;
};

/// crop (optional) -> segment -> seeded split -> fit stats on train.
DatasetBundle prepare_dataset(const std::vector<RawRecording>& recordings, const LabelMap& labels,
                              Task task, const PrepareOptions& options);

/// Writes bundle.json and samples.csv into `dir` (created when missing).
void write_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle);
DatasetBundle read_bundle(const std::filesystem::path& dir);

}  // namespace faultnet
